"""
Part borrowing across a collection of targets.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import replace

import numpy as np

from tno.shape.part_assembly.decomposer.config import ScheduleConfig
from tno.shape.part_assembly.decomposer.losses import refresh
from tno.shape.part_assembly.decomposer.phase1 import rerandomize
from tno.shape.part_assembly.decomposer.state import DecompositionState
from tno.shape.part_assembly.numcore import Tensor
from tno.shape.part_assembly.partvae import VaeParams

logger = logging.getLogger(__name__)


def worst_targets(errors: Sequence[float], worst_frac: float) -> list[int]:
    """
    The targets that try to borrow: the `worst_frac` fraction with the largest
    errors, rounded up. Ties go to the lower index.

    :param errors: reconstruction error per target
    :param worst_frac: fraction of targets
    :return: target indices, worst first
    """
    count = min(len(errors), math.ceil(worst_frac * len(errors) - 1e-9))
    order = np.argsort(-np.asarray(errors, dtype=float), kind="stable")
    return [int(index) for index in order[:count]]


def donors_for(target: int, worst: Sequence[int], distances: Tensor, neighbors: int) -> list[int]:
    """
    :param target: index of the borrowing target
    :param worst: indices of all borrowing targets
    :param distances: target-by-target distance matrix
    :param neighbors: maximum number of donors
    :return: the nearest targets outside the borrowing set, closest first
    """
    excluded = set(worst) | {target}
    order = np.argsort(distances[target], kind="stable")
    return [int(index) for index in order if int(index) not in excluded][:neighbors]


def transplant(receiver: DecompositionState, donor: DecompositionState) -> DecompositionState:
    """
    Give a receiver the latent parts of a donor, keeping the receiver's target,
    symmetry plane and seed stream.

    :param receiver: the borrowing state
    :param donor: the donating state
    :return: the receiver with the donor's parts and an empty decoded cache
    """
    parts = donor.parts
    if receiver.symmetry is None:
        parts = tuple(replace(part, merged=False) for part in parts)
    return replace(receiver, parts=parts, decoded=(), loss=math.inf, recon=math.inf)


def phase3_borrow(
    states: Sequence[DecompositionState],
    errors: Sequence[float],
    distances: Tensor,
    params: VaeParams,
    config: ScheduleConfig,
) -> list[DecompositionState]:
    """
    Let the worst reconstructed targets borrow the parts of well reconstructed neighbours.

    Every target among the worst `worst_frac` tries the variables of its
    `neighbors` nearest targets outside that set, closest first, and adopts the
    first whose reconstruction error on it lies within the `accept_frac`
    quantile of all errors. A target without an accepted donor is
    re-randomized from its own seed stream. All donors are read from the
    states as passed in.

    :param states: states of all targets of the collection
    :param errors: current reconstruction error per target
    :param distances: target-by-target Chamfer distance matrix
    :param params: frozen autoencoder parameters
    :param config: schedule thresholds
    :raise ValueError: if the sizes of the arguments disagree
    :return: the updated states, in input order
    """
    count = len(states)
    distances = np.asarray(distances, dtype=float)
    if len(errors) != count or distances.shape != (count, count):
        raise ValueError(
            f"expected {count} errors and a {count}x{count} distance matrix, "
            f"got {len(errors)} and {distances.shape}"
        )
    snapshot = tuple(states)
    result = list(snapshot)
    if count < 2:
        return result
    threshold = float(np.quantile(np.asarray(errors, dtype=float), config.accept_frac))
    worst = worst_targets(errors, config.worst_frac)
    for target in worst:
        receiver = snapshot[target]
        adopted = None
        for donor in donors_for(target, worst, distances, config.neighbors):
            candidate = refresh(transplant(receiver, snapshot[donor]), params, config.tau_overlap)
            if candidate.recon <= threshold:
                adopted = candidate
                logger.info(
                    "Target %s borrowed the parts of %s (error %.6f -> %.6f).",
                    receiver.target_id,
                    snapshot[donor].target_id,
                    errors[target],
                    candidate.recon,
                )
                break
        if adopted is None:
            adopted = rerandomize(receiver, params, config.tau_overlap)
            logger.info("Target %s found no donor and was re-randomized.", receiver.target_id)
        result[target] = adopted
    return result
