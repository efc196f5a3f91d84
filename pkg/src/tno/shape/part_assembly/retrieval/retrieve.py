"""
Final retrieval: segment the target by the optimized parts, fit library parts
to every segment and choose the part count.
"""

from __future__ import annotations

import asyncio
import logging
from collections.abc import Sequence
from typing import Literal

import numpy as np
import numpy.typing as npt

from tno.shape.part_assembly.decomposer import (
    DETECT,
    DecompositionState,
    ScheduleConfig,
    merge_symmetric,
    nn_segment,
    run_schedule,
)
from tno.shape.part_assembly.geom import PointCloud, SymmetryPlane, chamfer, validate_cloud
from tno.shape.part_assembly.numcore import Tensor
from tno.shape.part_assembly.partvae import PartLibrary, VaeParams
from tno.shape.part_assembly.retrieval.assembly import (
    DEFAULT_ALPHA,
    DEFAULT_K_SET,
    Assembly,
    KCandidate,
    RetrievedPart,
    select_k,
)
from tno.shape.part_assembly.retrieval.candidates import (
    chamfer_candidates,
    encode_library,
    latent_candidates,
)
from tno.shape.part_assembly.retrieval.config import FitConfig
from tno.shape.part_assembly.retrieval.exceptions import EmptyLibraryError
from tno.shape.part_assembly.retrieval.fitting import fit_part_to_segment

logger = logging.getLogger(__name__)

OutputFormat = Literal["segment", "direct"]


def final_segment(target: PointCloud, parts: Sequence[PointCloud]) -> list[npt.NDArray[np.intp]]:
    """
    Assign every target point to its closest decoded part, ties to the lower index.

    :param target: the target cloud
    :param parts: the posed decoded parts, mirrored duplicates included
    :return: the target point indices per part
    """
    return nn_segment(target, parts)


def retrieve_for_segment(
    segment: PointCloud,
    library: PartLibrary,
    q: int | None = None,
    config: FitConfig | None = None,
    candidates: Sequence[int] | None = None,
) -> RetrievedPart:
    """
    Retrieve the library part that best fits a cloud.

    Unless `candidates` is given, the q parts nearest to the cloud in the
    canonical frame are pose-fitted; q defaults to the whole library. The
    lowest fit wins, ties go to the lower part id.

    :param segment: the non-empty cloud to match
    :param library: the part library
    :param q: number of candidates
    :param config: pose fitting parameters
    :param candidates: library indices to fit instead of a preselection
    :raise EmptyLibraryError: if the library is empty
    :raise ValueError: if q is not in [1, library size]
    :return: the part with its pose and fit; its segment is empty
    """
    config = config if config is not None else FitConfig()
    if not len(library):
        raise EmptyLibraryError()
    segment = validate_cloud(segment, "segment")
    q = len(library) if q is None else q
    if not 1 <= q <= len(library):
        raise ValueError(f"q must lie in [1, {len(library)}], got {q}")
    indices = list(candidates) if candidates is not None else chamfer_candidates(segment, library, q)
    best: RetrievedPart | None = None
    for index in indices:
        entry = library[index]
        pose, fit = fit_part_to_segment(entry.points, segment, config)
        logger.debug("Candidate %s fits at %.6f.", entry.id, fit)
        if best is None or (fit, entry.id) < (best.fit, best.part_id):
            best = RetrievedPart(entry.id, pose, fit)
    assert best is not None
    return best


def direct_retrieval(
    decoded: PointCloud,
    library: PartLibrary,
    q: int | None = None,
    config: FitConfig | None = None,
    candidates: Sequence[int] | None = None,
) -> RetrievedPart:
    """
    Retrieve for a decoded part cloud itself instead of its target segment.

    :param decoded: a posed decoded part
    :param library: the part library
    :param q: number of candidates
    :param config: pose fitting parameters
    :param candidates: library indices to fit instead of a preselection
    :return: the part with its pose and its fit to the decoded cloud
    """
    return retrieve_for_segment(decoded, library, q, config, candidates)


def direct_recon_error(state: DecompositionState) -> float:
    """
    :param state: a state with decoded cache
    :return: the Chamfer distance between the pooled decoded parts and the target
    """
    return chamfer(state.pooled(), state.target)


def _owners(state: DecompositionState) -> list[int]:
    return list(range(state.k)) + list(state.mirrored)


def retrieve_state(
    state: DecompositionState,
    library: PartLibrary,
    params: VaeParams,
    config: FitConfig | None = None,
    schedule: ScheduleConfig | None = None,
    library_codes: Tensor | None = None,
    output_format: OutputFormat = "segment",
    seed: int = 0,
    config_hash: str = "",
) -> Assembly:
    """
    Turn an optimized state into an assembly of library parts.

    Parts touching their mirror are merged first. Every posed part, mirrored
    duplicates included, gets the target points closest to it. Parts with an
    empty segment are dropped. With a candidate fraction below one and library
    codes available, candidates are preselected in the latent space.

    :param state: the optimized state, with decoded cache
    :param library: the part library
    :param params: frozen autoencoder parameters
    :param config: pose fitting parameters
    :param schedule: thresholds of the symmetric merge
    :param library_codes: latent codes of the library parts
    :param output_format: fit to the target segments or to the decoded parts
    :param seed: seed recorded in the assembly
    :param config_hash: configuration hash recorded in the assembly
    :raise EmptyLibraryError: if the library is empty
    :return: the assembly
    """
    config = config if config is not None else FitConfig()
    schedule = schedule if schedule is not None else ScheduleConfig()
    if not len(library):
        raise EmptyLibraryError()
    state = merge_symmetric(state, params, schedule.tau_cc, schedule.tau_overlap)
    q = config.candidate_count(len(library))
    if q < len(library) and library_codes is None:
        library_codes = encode_library(library, params)
    owners = _owners(state)
    parts = []
    for position, indices in enumerate(final_segment(state.target, state.decoded)):
        if not len(indices):
            logger.debug("Target %s: posed part %d has an empty segment.", state.target_id, position)
            continue
        candidates = None
        if q < len(library):
            assert library_codes is not None
            candidates = latent_candidates(state.parts[owners[position]].code, library_codes, q)
        cloud = state.target[indices] if output_format == "segment" else state.decoded[position]
        retrieved = retrieve_for_segment(cloud, library, q, config, candidates)
        parts.append(RetrievedPart(retrieved.part_id, retrieved.pose, retrieved.fit, indices))
    vcd = chamfer(np.concatenate([part.posed(library) for part in parts]), state.target)
    logger.info("Target %s, k=%d: %d parts retrieved, VCD %.6f.", state.target_id, state.k, len(parts), vcd)
    return Assembly(
        state.target_id, state.k, tuple(parts), vcd, output_format=output_format, seed=seed, config_hash=config_hash
    )


def _assemble_k(
    target: PointCloud,
    k: int,
    library: PartLibrary,
    params: VaeParams,
    schedule: ScheduleConfig,
    config: FitConfig,
    codes: Tensor | None,
    seed: int,
    target_id: str,
    symmetry: SymmetryPlane | None | str,
    config_hash: str,
) -> KCandidate:
    state = run_schedule(target, k, schedule, params, seed=seed, target_id=target_id, symmetry=symmetry)
    assembly = retrieve_state(state, library, params, config, schedule, codes, seed=seed, config_hash=config_hash)
    return KCandidate(k, assembly.vcd, assembly.part_count, state, assembly)


def _prepare(
    library: PartLibrary,
    params: VaeParams,
    schedule: ScheduleConfig | None,
    config: FitConfig | None,
    workers: int,
) -> tuple[ScheduleConfig, FitConfig, Tensor | None]:
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    if not len(library):
        raise EmptyLibraryError()
    schedule = schedule if schedule is not None else ScheduleConfig()
    config = config if config is not None else FitConfig()
    codes = encode_library(library, params) if config.candidate_frac < 1.0 else None
    return schedule, config, codes


def _choose(candidates: list[KCandidate], alpha: float) -> tuple[Assembly, list[KCandidate]]:
    chosen = select_k(candidates, alpha)
    assert chosen.assembly is not None
    return chosen.assembly, candidates


async def assemble_async(
    target: PointCloud,
    library: PartLibrary,
    params: VaeParams,
    schedule: ScheduleConfig | None = None,
    k_set: Sequence[int] = DEFAULT_K_SET,
    alpha: float = DEFAULT_ALPHA,
    config: FitConfig | None = None,
    seed: int = 0,
    target_id: str = "target",
    symmetry: SymmetryPlane | None | str = DETECT,
    config_hash: str = "",
    workers: int = 1,
) -> tuple[Assembly, list[KCandidate]]:
    """
    Reconstruct one target from scratch, running the part counts in worker threads.

    At most `workers` part counts run at a time. Every part count uses the
    same seed, so the outcome equals that of the serial `assemble`.

    :param target: the target cloud
    :param library: the part library
    :param params: frozen autoencoder parameters
    :param schedule: the decomposition schedule
    :param k_set: the part counts to try
    :param alpha: price of one part
    :param config: pose fitting parameters
    :param seed: seed of all decompositions
    :param target_id: identifier of the target
    :param symmetry: the target's symmetry plane, None for none, or `DETECT`
    :param config_hash: configuration hash recorded in the assemblies
    :param workers: number of part counts running at the same time
    :raise EmptyLibraryError: if the library is empty
    :raise ValueError: if `workers` is not positive
    :return: the chosen assembly and the candidates of all part counts, in the order of `k_set`
    """
    schedule, config, codes = _prepare(library, params, schedule, config, workers)
    semaphore = asyncio.Semaphore(workers)

    async def run(k: int) -> KCandidate:
        async with semaphore:
            return await asyncio.to_thread(
                _assemble_k, target, k, library, params, schedule, config, codes, seed, target_id, symmetry, config_hash
            )

    candidates = await asyncio.gather(*(run(k) for k in k_set))
    return _choose(list(candidates), alpha)


def assemble(
    target: PointCloud,
    library: PartLibrary,
    params: VaeParams,
    schedule: ScheduleConfig | None = None,
    k_set: Sequence[int] = DEFAULT_K_SET,
    alpha: float = DEFAULT_ALPHA,
    config: FitConfig | None = None,
    seed: int = 0,
    target_id: str = "target",
    symmetry: SymmetryPlane | None | str = DETECT,
    config_hash: str = "",
    workers: int = 1,
) -> tuple[Assembly, list[KCandidate]]:
    """
    Reconstruct one target from scratch.

    Runs the decomposition schedule for every part count, retrieves library
    parts for every result and keeps the part count of lowest penalty. With
    more than one worker the part counts run in parallel through
    `assemble_async`; the outcome does not depend on the number of workers.

    :param target: the target cloud
    :param library: the part library
    :param params: frozen autoencoder parameters
    :param schedule: the decomposition schedule
    :param k_set: the part counts to try
    :param alpha: price of one part
    :param config: pose fitting parameters
    :param seed: seed of all decompositions
    :param target_id: identifier of the target
    :param symmetry: the target's symmetry plane, None for none, or `DETECT`
    :param config_hash: configuration hash recorded in the assemblies
    :param workers: number of part counts running at the same time
    :raise EmptyLibraryError: if the library is empty
    :raise ValueError: if `workers` is not positive
    :return: the chosen assembly and the candidates of all part counts
    """
    if workers > 1:
        return asyncio.run(
            assemble_async(
                target, library, params, schedule, k_set, alpha, config, seed, target_id, symmetry, config_hash, workers
            )
        )
    schedule, config, codes = _prepare(library, params, schedule, config, workers)
    candidates = [
        _assemble_k(target, k, library, params, schedule, config, codes, seed, target_id, symmetry, config_hash)
        for k in k_set
    ]
    return _choose(candidates, alpha)
