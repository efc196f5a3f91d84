"""
The nested optimize, shift and borrow schedule of one target or of a
collection of targets.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace

from tno.shape.part_assembly.decomposer.config import ScheduleConfig
from tno.shape.part_assembly.decomposer.phase1 import DETECT, init_state, phase1_run
from tno.shape.part_assembly.decomposer.phase2 import phase2_shift
from tno.shape.part_assembly.decomposer.phase3 import phase3_borrow
from tno.shape.part_assembly.decomposer.state import DecompositionState
from tno.shape.part_assembly.geom import PointCloud, SymmetryPlane
from tno.shape.part_assembly.numcore import Tensor
from tno.shape.part_assembly.partvae import VaeParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScheduleProgress:
    """
    The current state of a target in the schedule together with the best state seen so far.
    """

    current: DecompositionState
    best: DecompositionState

    @classmethod
    def start(cls, state: DecompositionState) -> ScheduleProgress:
        """
        :param state: the initial state, with decoded cache
        :return: progress whose best state is the initial state
        """
        return cls(state, state)

    def advance(self, state: DecompositionState) -> ScheduleProgress:
        """
        Move to a new current state, keeping the best one. Ties keep the earlier state.

        :param state: the new current state, with decoded cache
        :return: the updated progress
        """
        best = state if state.loss < self.best.loss else self.best
        return ScheduleProgress(state, best)

    def result(self) -> DecompositionState:
        """
        :return: the best state, carrying the full loss history
        """
        return replace(self.best, history=self.current.history)


def shift_rounds(progress: ScheduleProgress, params: VaeParams, config: ScheduleConfig) -> ScheduleProgress:
    """
    Run `n2` rounds of a gradient run followed by a part shift (if enabled).

    :param progress: progress of one target
    :param params: frozen autoencoder parameters
    :param config: the schedule
    :return: the updated progress
    """
    for _ in range(config.n2):
        progress = progress.advance(
            phase1_run(progress.current, params, config.n1, config.lr, config.tau_overlap)
        )
        if config.phase2:
            progress = progress.advance(phase2_shift(progress.current, params, config))
    return progress


def borrow(
    progresses: Sequence[ScheduleProgress],
    distances: Tensor,
    params: VaeParams,
    config: ScheduleConfig,
) -> list[ScheduleProgress]:
    """
    Apply part borrowing to the current states of a collection.

    :param progresses: progress per target, all with the same part count
    :param distances: target-by-target Chamfer distance matrix
    :param params: frozen autoencoder parameters
    :param config: the schedule
    :return: the updated progress per target
    """
    states = [progress.current for progress in progresses]
    errors = [state.recon for state in states]
    borrowed = phase3_borrow(states, errors, distances, params, config)
    return [progress.advance(state) for progress, state in zip(progresses, borrowed)]


def finish(progress: ScheduleProgress, params: VaeParams, config: ScheduleConfig) -> DecompositionState:
    """
    Run the closing gradient run and return the best state.

    :param progress: progress of one target
    :param params: frozen autoencoder parameters
    :param config: the schedule
    :return: the best state seen
    """
    if config.final_steps > 0:
        progress = progress.advance(
            phase1_run(progress.current, params, config.final_steps, config.lr, config.tau_overlap)
        )
    result = progress.result()
    logger.info("Target %s with k=%d finished at loss %.6f.", result.target_id, result.k, result.loss)
    return result


def run_schedule(
    target: PointCloud,
    k: int,
    config: ScheduleConfig,
    params: VaeParams,
    seed: int = 0,
    target_id: str = "target",
    symmetry: SymmetryPlane | None | str = DETECT,
) -> DecompositionState:
    """
    Decompose a single target.

    Runs `n3` times `n2` rounds of gradient optimization and part shift,
    followed by a closing gradient run. Borrowing needs a collection and is
    skipped; see `borrow` for collections.

    :param target: the target cloud
    :param k: number of free parts
    :param config: the schedule
    :param params: frozen autoencoder parameters
    :param seed: seed of the initialization and of all later randomness
    :param target_id: identifier of the target
    :param symmetry: the target's symmetry plane, None for none, or `DETECT`
    :raise NonFiniteLossError: if the loss becomes non-finite
    :return: the state with the lowest loss seen
    """
    state = init_state(
        target,
        k,
        params,
        seed=seed,
        tau=config.tau_overlap,
        target_id=target_id,
        symmetry=symmetry,  # type: ignore[arg-type]
        symmetry_config=config.symmetry,
    )
    progress = ScheduleProgress.start(state)
    for round_index in range(config.n3):
        progress = shift_rounds(progress, params, config)
        logger.debug("Target %s round %d/%d: loss %.6f", target_id, round_index + 1, config.n3, progress.best.loss)
    return finish(progress, params, config)
