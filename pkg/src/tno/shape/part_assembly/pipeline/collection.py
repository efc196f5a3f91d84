"""
Collection-mode optimization: every target of a training set is decomposed
for every part count, with part borrowing between the targets.

Work is split into (target, part count) tasks that run in worker threads,
bounded by a semaphore and gathered in dataset order. Borrowing is a barrier
over the gathered states of one part count. Each target draws its randomness
from a seed derived from the master seed and its id, so the number of
workers does not change the results.
"""

from __future__ import annotations

import asyncio
import logging
import os
from collections.abc import Awaitable, Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TypeVar

import numpy as np

from tno.shape.part_assembly.decomposer import (
    DETECT,
    DecompositionState,
    ScheduleProgress,
    borrow,
    finish,
    init_state,
    shift_rounds,
)
from tno.shape.part_assembly.geom import PointCloud, chamfer
from tno.shape.part_assembly.numcore import Tensor
from tno.shape.part_assembly.partvae import VaeParams
from tno.shape.part_assembly.pipeline.bank import TrainingBank, save_training_bank
from tno.shape.part_assembly.pipeline.config import RunConfig
from tno.shape.part_assembly.pipeline.dataset import Dataset, stream_seed
from tno.shape.part_assembly.retrieval import Assembly, KCandidate, encode_library, retrieve_state, select_k

logger = logging.getLogger(__name__)

T = TypeVar("T")
Key = tuple[str, int]


def target_distance_matrix(targets: Sequence[PointCloud]) -> Tensor:
    """
    Chamfer distance between every pair of targets.

    :param targets: at least two target clouds
    :raise ValueError: for fewer than two targets
    :return: symmetric matrix with zero diagonal
    """
    if len(targets) < 2:
        raise ValueError(f"a distance matrix needs at least two targets, got {len(targets)}")
    distances = np.zeros((len(targets), len(targets)))
    for row in range(len(targets)):
        for column in range(row + 1, len(targets)):
            distances[row, column] = distances[column, row] = chamfer(targets[row], targets[column])
    return distances


@dataclass(frozen=True, eq=False)
class TargetResult:
    """
    Outcome of one target of a collection run: the candidates of all part
    counts that finished, the chosen assembly and the failures.
    """

    target_id: str
    candidates: tuple[KCandidate, ...] = ()
    assembly: Assembly | None = None
    errors: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        """
        :return: whether an assembly was chosen
        """
        return self.assembly is not None

    @property
    def chosen(self) -> KCandidate | None:
        """
        :return: the candidate of the chosen part count
        """
        for candidate in self.candidates:
            if candidate.assembly is self.assembly:
                return candidate
        return None


class _Runner:
    """
    Runs blocking work in threads, at most `workers` at a time, and records failures per key.
    """

    def __init__(self, workers: int) -> None:
        self.semaphore = asyncio.Semaphore(workers)
        self.failures: dict[Key, str] = {}

    async def _call(self, function: Callable[..., T], *args: Any) -> T:
        async with self.semaphore:
            return await asyncio.to_thread(function, *args)

    async def map(self, work: dict[Key, tuple[Callable[..., T], tuple[Any, ...]]]) -> dict[Key, T]:
        """
        Run all work items and keep the results of those that succeed.

        :param work: function and arguments per key
        :return: result per successful key, in the order of `work`
        """
        calls: list[Awaitable[T]] = [self._call(function, *args) for function, args in work.values()]
        outcomes = await asyncio.gather(*calls, return_exceptions=True)
        results: dict[Key, T] = {}
        for key, outcome in zip(work, outcomes):
            if isinstance(outcome, Exception):
                logger.warning("Target %s with k=%d failed: %s", key[0], key[1], outcome)
                self.failures[key] = f"k={key[1]}: {outcome}"
            elif isinstance(outcome, BaseException):
                raise outcome
            else:
                results[key] = outcome
        return results


def _start(
    target: PointCloud, target_id: str, k: int, params: VaeParams, config: RunConfig
) -> ScheduleProgress:
    schedule = config.schedule
    state = init_state(
        target,
        k,
        params,
        seed=stream_seed(config.seed, target_id),
        tau=schedule.tau_overlap,
        target_id=target_id,
        symmetry=DETECT if config.symmetry else None,
        symmetry_config=schedule.symmetry,
    )
    return ScheduleProgress.start(state)


def _borrow(
    progresses: dict[Key, ScheduleProgress],
    index: dict[str, int],
    distances: Tensor | None,
    params: VaeParams,
    config: RunConfig,
) -> dict[Key, ScheduleProgress]:
    if distances is None or not config.schedule.phase3:
        return progresses
    updated = dict(progresses)
    for k in config.k_set:
        keys = [key for key in progresses if key[1] == k]
        if len(keys) < 2:
            continue
        rows = [index[target_id] for target_id, _ in keys]
        borrowed = borrow([progresses[key] for key in keys], distances[np.ix_(rows, rows)], params, config.schedule)
        updated.update(zip(keys, borrowed))
    return updated


async def run_collection(
    dataset: Dataset,
    params: VaeParams,
    config: RunConfig | None = None,
    output_dir: str | os.PathLike[str] | None = None,
) -> list[TargetResult]:
    """
    Decompose and assemble every target of a dataset.

    For every part count, each target runs `n3` rounds of `n2` gradient runs
    and part shifts, with part borrowing among all targets after every round,
    followed by the closing gradient run. The best state of every part count
    is retrieved and the part count of lowest penalty is chosen. A target that
    fails for some part count keeps its other part counts; the run never stops
    because of one target.

    With an output directory, the chosen assemblies are written to
    `assemblies/<target id>.json` and the chosen states to the training bank
    in `bank/`.

    :param dataset: the targets and the library
    :param params: frozen autoencoder parameters
    :param config: the run configuration
    :param output_dir: directory to write manifests and the training bank to
    :return: one result per target, in dataset order
    """
    config = config if config is not None else RunConfig()
    schedule = config.schedule
    config_hash = config.config_hash()
    ids = dataset.ids
    clouds = dict(dataset.targets)
    index = {target_id: position for position, target_id in enumerate(ids)}
    distances = target_distance_matrix([clouds[target_id] for target_id in ids]) if len(ids) >= 2 else None
    runner = _Runner(config.workers)
    logger.info("Collection run over %d targets and k in %s (config %s).", len(ids), config.k_set, config_hash)

    progresses = await runner.map(
        {
            (target_id, k): (_start, (clouds[target_id], target_id, k, params, config))
            for target_id in ids
            for k in config.k_set
        }
    )
    for round_index in range(schedule.n3):
        progresses = await runner.map(
            {key: (shift_rounds, (progress, params, schedule)) for key, progress in progresses.items()}
        )
        progresses = _borrow(progresses, index, distances, params, config)
        logger.info("Collection round %d/%d done, %d tasks alive.", round_index + 1, schedule.n3, len(progresses))
    states: dict[Key, DecompositionState] = await runner.map(
        {key: (finish, (progress, params, schedule)) for key, progress in progresses.items()}
    )

    codes = encode_library(dataset.library, params) if config.fit.candidate_frac < 1.0 else None
    assemblies: dict[Key, Assembly] = await runner.map(
        {
            key: (
                retrieve_state,
                (
                    state,
                    dataset.library,
                    params,
                    config.fit,
                    schedule,
                    codes,
                    config.output_format,
                    stream_seed(config.seed, key[0]),
                    config_hash,
                ),
            )
            for key, state in states.items()
        }
    )

    results = []
    for target_id in ids:
        candidates = []
        for k in config.k_set:
            if (target_id, k) in assemblies:
                assembly = assemblies[(target_id, k)]
                candidates.append(KCandidate(k, assembly.vcd, assembly.part_count, states[(target_id, k)], assembly))
        errors = tuple(message for key, message in runner.failures.items() if key[0] == target_id)
        chosen = select_k(candidates, config.alpha).assembly if candidates else None
        if chosen is None:
            logger.warning("Target %s failed for every part count.", target_id)
        results.append(TargetResult(target_id, tuple(candidates), chosen, errors))

    if output_dir is not None:
        directory = Path(output_dir)
        (directory / "assemblies").mkdir(parents=True, exist_ok=True)
        for result in results:
            if result.assembly is not None:
                result.assembly.save(directory / "assemblies" / f"{result.target_id}.json")
        save_training_bank(TrainingBank.from_results(results), directory / "bank")
    return results


def run_collection_sync(
    dataset: Dataset,
    params: VaeParams,
    config: RunConfig | None = None,
    output_dir: str | os.PathLike[str] | None = None,
) -> list[TargetResult]:
    """
    Blocking variant of `run_collection`.

    :param dataset: the targets and the library
    :param params: frozen autoencoder parameters
    :param config: the run configuration
    :param output_dir: directory to write manifests and the training bank to
    :return: one result per target, in dataset order
    """
    return asyncio.run(run_collection(dataset, params, config, output_dir))
