"""
The brute-force baseline: random draws of k library parts, each pose-fitted
to the whole target, keeping the best draw.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from tno.shape.part_assembly.decomposer import ScheduleConfig, nn_segment
from tno.shape.part_assembly.geom import PointCloud, apply_pose, chamfer, validate_cloud
from tno.shape.part_assembly.partvae import PartLibrary
from tno.shape.part_assembly.pipeline import scratch_steps
from tno.shape.part_assembly.retrieval import Assembly, EmptyLibraryError, FitConfig, RetrievedPart, fit_part_to_segment

logger = logging.getLogger(__name__)


def matched_budget(
    schedule: ScheduleConfig, k_set: tuple[int, ...], k: int, library_size: int, config: FitConfig
) -> int:
    """
    The number of brute-force draws that costs as many gradient steps as the
    decomposition of one target followed by retrieval over the whole library.

    :param schedule: the decomposition schedule
    :param k_set: the part counts the decomposition tries
    :param k: parts per brute-force draw
    :param library_size: number of library parts
    :param config: pose fitting parameters
    :return: the number of draws, at least one
    """
    per_fit = config.restarts * config.steps
    method = scratch_steps(schedule, len(k_set)) + sum(k_set) * library_size * per_fit
    return max(1, math.ceil(method / max(1, k * per_fit)))


def bf_search(
    target: PointCloud,
    library: PartLibrary,
    k: int,
    budget: int,
    seed: int = 0,
    config: FitConfig | None = None,
    target_id: str = "target",
) -> tuple[Assembly, list[float]]:
    """
    Run the brute-force baseline and report its progress.

    Every draw picks `k` parts uniformly with replacement and fits each to the
    whole target. The draw whose pooled posed parts lie closest to the target
    wins; ties keep the earlier draw. The segments of the winner are the
    target points closest to each of its parts.

    :param target: the target cloud
    :param library: the non-empty part library
    :param k: parts per draw
    :param budget: number of draws
    :param seed: seed of the draws
    :param config: pose fitting parameters
    :param target_id: identifier of the target
    :raise ValueError: if `k` or `budget` is not positive
    :raise EmptyLibraryError: if the library is empty
    :return: the best assembly and the best distance after every draw
    """
    if k < 1 or budget < 1:
        raise ValueError(f"k and budget must be positive, got {k} and {budget}")
    if not len(library):
        raise EmptyLibraryError()
    target = validate_cloud(target, "target")
    config = config if config is not None else FitConfig()
    rng = np.random.default_rng(seed)
    best: tuple[float, list[RetrievedPart]] | None = None
    history = []
    for draw in range(budget):
        parts = []
        for index in rng.integers(0, len(library), size=k):
            entry = library[int(index)]
            pose, fit = fit_part_to_segment(entry.points, target, config)
            parts.append(RetrievedPart(entry.id, pose, fit))
        pooled = np.concatenate([part.posed(library) for part in parts])
        distance = chamfer(pooled, target)
        if best is None or distance < best[0]:
            best = (distance, parts)
        history.append(best[0])
        logger.debug("Brute-force draw %d/%d: %.6f (best %.6f).", draw + 1, budget, distance, best[0])
    assert best is not None
    distance, parts = best
    posed = [apply_pose(library.get(part.part_id).points, part.pose) for part in parts]
    segmented = tuple(
        RetrievedPart(part.part_id, part.pose, part.fit, segment)
        for part, segment in zip(parts, nn_segment(target, posed))
    )
    return Assembly(target_id, k, segmented, distance, seed=seed), history


def bf_baseline(
    target: PointCloud,
    library: PartLibrary,
    k: int,
    budget: int,
    seed: int = 0,
    config: FitConfig | None = None,
    target_id: str = "target",
) -> Assembly:
    """
    Reconstruct a target from the best of `budget` random draws of `k` parts.

    :param target: the target cloud
    :param library: the non-empty part library
    :param k: parts per draw
    :param budget: number of draws
    :param seed: seed of the draws
    :param config: pose fitting parameters
    :param target_id: identifier of the target
    :return: the best assembly
    """
    return bf_search(target, library, k, budget, seed, config, target_id)[0]
