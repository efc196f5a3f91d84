"""
Amortized inference: a new target starts from the decomposition of its
nearest training target and only runs a short refinement.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from tno.shape.part_assembly.decomposer import (
    DETECT,
    DecompositionState,
    ScheduleConfig,
    init_state,
    phase1_run,
    refresh,
)
from tno.shape.part_assembly.decomposer.phase3 import transplant
from tno.shape.part_assembly.geom import PointCloud
from tno.shape.part_assembly.partvae import PartLibrary, VaeParams
from tno.shape.part_assembly.pipeline.bank import TrainingBank
from tno.shape.part_assembly.pipeline.config import RunConfig
from tno.shape.part_assembly.pipeline.dataset import stream_seed
from tno.shape.part_assembly.retrieval import Assembly, assemble, retrieve_state

logger = logging.getLogger(__name__)


def scratch_steps(schedule: ScheduleConfig, k_count: int = 1) -> int:
    """
    :param schedule: the schedule
    :param k_count: number of part counts tried
    :return: the gradient steps of decomposing a target from scratch
    """
    return k_count * (schedule.n3 * schedule.n2 * schedule.n1 + schedule.final_steps)


@dataclass(frozen=True, eq=False)
class InferenceResult:
    """
    The assembly of a new target and how it was obtained.

    `fallback` is set when the bank was empty and the target was assembled
    from scratch; `neighbor` then is None.
    """

    assembly: Assembly
    state: DecompositionState | None
    neighbor: str | None
    distance: float | None
    steps: int
    fallback: bool = False


def amortized_infer(
    target: PointCloud,
    bank: TrainingBank,
    library: PartLibrary,
    params: VaeParams,
    config: RunConfig | None = None,
    target_id: str = "query",
) -> InferenceResult:
    """
    Assemble a new target starting from its nearest training target.

    The latent parts of the nearest bank state, at its chosen part count,
    initialize a gradient-only run of `short_steps` steps, followed by the
    final retrieval.

    :param target: the new target cloud
    :param bank: the training bank
    :param library: the part library
    :param params: frozen autoencoder parameters
    :param config: the run configuration
    :param target_id: identifier of the new target
    :return: the assembly with its provenance
    """
    config = config if config is not None else RunConfig()
    schedule = config.schedule
    seed = stream_seed(config.seed, target_id)
    symmetry = DETECT if config.symmetry else None
    if not len(bank):
        logger.warning("Training bank is empty; assembling %s from scratch.", target_id)
        assembly, _ = assemble(
            target,
            library,
            params,
            schedule,
            config.k_set,
            config.alpha,
            config.fit,
            seed,
            target_id,
            symmetry,
            config.config_hash(),
            workers=config.workers,
        )
        return InferenceResult(assembly, None, None, None, scratch_steps(schedule, len(config.k_set)), True)
    neighbor, distance = bank.nearest(target)
    logger.info("Target %s starts from %s (k=%d, distance %.6f).", target_id, neighbor.target_id, neighbor.k, distance)
    state = init_state(
        target,
        neighbor.k,
        params,
        seed=seed,
        tau=schedule.tau_overlap,
        target_id=target_id,
        symmetry=symmetry,
        symmetry_config=schedule.symmetry,
    )
    state = refresh(transplant(state, neighbor), params, schedule.tau_overlap)
    state = phase1_run(state, params, config.short_steps, schedule.lr, schedule.tau_overlap)
    assembly = retrieve_state(
        state,
        library,
        params,
        config.fit,
        schedule,
        output_format=config.output_format,  # type: ignore[arg-type]
        seed=seed,
        config_hash=config.config_hash(),
    )
    return InferenceResult(assembly, state, neighbor.target_id, distance, config.short_steps)
