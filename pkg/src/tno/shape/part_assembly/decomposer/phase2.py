"""
Part shift: segment the target by the current parts, drop the best covered
points, keep the most remote connected piece of every segment and re-encode
it as a new latent part.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np
import numpy.typing as npt

from tno.shape.part_assembly.decomposer.config import ScheduleConfig
from tno.shape.part_assembly.decomposer.losses import refresh
from tno.shape.part_assembly.decomposer.state import DecompositionState, LatentPart
from tno.shape.part_assembly.geom import (
    PointCloud,
    component_sizes,
    connected_components,
    pairwise_distances,
    validate_cloud,
)
from tno.shape.part_assembly.numcore import Tensor, nearest
from tno.shape.part_assembly.partvae import (
    DegeneratePartError,
    VaeParams,
    canonicalize_cloud,
    encode,
    resample,
)

logger = logging.getLogger(__name__)

Indices = npt.NDArray[np.intp]


@dataclass(frozen=True)
class SwapResult:
    """
    Outcome of a swap: the replaced column (if any), the least covered target
    points and the distance matrix after the swap.
    """

    column: int | None
    uncovered: Indices
    q: Tensor
    coverage_before: float
    coverage_after: float


def coverage(q: Tensor) -> float:
    """
    :param q: distance matrix of target points to parts
    :return: the mean over target points of the distance to the closest part
    """
    return float(q.min(axis=1).mean())


def least_covered(q: Tensor, fraction: float) -> Indices:
    """
    The `fraction` of target points farthest from every part; ties go to the lower index.

    :param q: distance matrix of target points to parts
    :param fraction: fraction of points to return, rounded up
    :return: the point indices, farthest first
    """
    count = min(len(q), max(1, math.ceil(fraction * len(q) - 1e-9)))
    order = np.argsort(-q.min(axis=1), kind="stable")
    return order[:count]


def swap_least_covered(target: PointCloud, q: Tensor, swap_frac: float) -> SwapResult:
    """
    Replace the part whose removal hurts coverage least by the least covered target points.

    For every part, the coverage statistic is evaluated with that part's column
    removed and the least covered points counted as covered. The part with the
    lowest statistic (ties to the lower index) is replaced iff its statistic
    improves on the current coverage; its column then holds the distances to
    the least covered points.

    :param target: the target cloud
    :param q: distance matrix of target points to parts, shape (N, k)
    :param swap_frac: fraction of target points considered uncovered
    :return: the swap outcome
    """
    target = validate_cloud(target, "target")
    before = coverage(q)
    uncovered = least_covered(q, swap_frac)
    if q.shape[1] < 2:
        return SwapResult(None, uncovered, q, before, before)
    best_column, best_value = None, before
    for column in range(q.shape[1]):
        row_min = np.delete(q, column, axis=1).min(axis=1)
        row_min[uncovered] = 0.0
        value = float(row_min.mean())
        if value < best_value:
            best_column, best_value = column, value
    if best_column is None:
        return SwapResult(None, uncovered, q, before, before)
    swapped = q.copy()
    swapped[:, best_column] = nearest(target, target[uncovered])[0]
    logger.debug("Swapped part %d for %d uncovered points (coverage %.5f).", best_column, len(uncovered), best_value)
    return SwapResult(best_column, uncovered, swapped, before, coverage(swapped))


def segment_labels(q: Tensor) -> Indices:
    """
    :param q: distance matrix of target points to parts
    :return: per target point the closest part, ties to the lower index
    """
    return np.argmin(q, axis=1)


def nn_segment(target: PointCloud, parts: Sequence[PointCloud], q: Tensor | None = None) -> list[Indices]:
    """
    Assign every target point to its closest part.

    :param target: the target cloud
    :param parts: the posed part clouds
    :param q: precomputed distance matrix of target points to `parts`
    :return: per part the indices of its target points; the segments partition the target
    """
    q = q if q is not None else pairwise_distances(target, parts)
    labels = segment_labels(q)
    return [np.flatnonzero(labels == column) for column in range(q.shape[1])]


def _keep_count(size: int, p: float) -> int:
    if size == 0:
        return 0
    return max(1, math.ceil((1.0 - p) * size - 1e-9))


def filter_covered(
    segments: Sequence[Indices], q: Tensor, p: float, global_filter: bool = False
) -> list[Indices]:
    """
    Drop the best covered points of the segments.

    Per segment, the fraction `p` of points closest to the segment's own part
    is discarded (ties drop the lower index first) and at least the farthest
    point is kept. With `global_filter`, the fraction is taken over the whole
    target instead and every non-empty segment still keeps its farthest point.

    :param segments: target point indices per part
    :param q: distance matrix of target points to parts
    :param p: fraction of points to discard
    :param global_filter: filter over the whole target
    :return: the retained indices per segment, in increasing order
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    if global_filter:
        return _filter_global(segments, q, p)
    result = []
    for column, segment in enumerate(segments):
        segment = np.asarray(segment, dtype=np.intp)
        order = np.argsort(q[segment, column], kind="stable")
        keep = order[len(segment) - _keep_count(len(segment), p) :]
        result.append(np.sort(segment[keep]))
    return result


def _filter_global(segments: Sequence[Indices], q: Tensor, p: float) -> list[Indices]:
    owners = np.full(len(q), -1, dtype=np.intp)
    for column, segment in enumerate(segments):
        owners[segment] = column
    members = np.flatnonzero(owners >= 0)
    distances = q[members, owners[members]]
    order = np.argsort(distances, kind="stable")
    kept = set(members[order[len(members) - _keep_count(len(members), p) :]].tolist())
    result = []
    for column, segment in enumerate(segments):
        segment = np.asarray(segment, dtype=np.intp)
        retained = [index for index in segment.tolist() if index in kept]
        if not retained and len(segment):
            retained = [int(segment[np.argsort(q[segment, column], kind="stable")[-1]])]
        result.append(np.array(sorted(retained), dtype=np.intp))
    return result


def farthest_component(segment: PointCloud, others: PointCloud | None, tau_cc: float) -> PointCloud:
    """
    The connected piece of a segment that lies farthest from the other segments.

    Components are those of the graph with edges between points closer than
    `tau_cc`. The component whose centroid has the largest mean distance to the
    pooled other segments is returned; without other segments the largest
    component is returned. Ties go to the component with the lowest label.

    :param segment: points of the segment
    :param others: pooled points of all other segments, or None
    :param tau_cc: edge threshold
    :return: the points of the component
    """
    segment = validate_cloud(segment, "segment")
    labels = connected_components(segment, tau_cc)
    count = int(labels.max()) + 1
    if count == 1:
        return segment
    if others is None or len(others) == 0:
        chosen = int(np.argmax(component_sizes(labels)))
    else:
        scores = [
            float(np.linalg.norm(others - segment[labels == label].mean(axis=0), axis=1).mean())
            for label in range(count)
        ]
        chosen = int(np.argmax(scores))
    return segment[labels == chosen]


def reencode(
    component: PointCloud,
    params: VaeParams,
    seed: int | np.random.SeedSequence = 0,
    merged: bool = False,
) -> LatentPart:
    """
    Turn a piece of the target into a latent part.

    The piece is resampled to the network's point count, brought into its
    canonical frame and encoded; the pose undoes the canonicalization.

    :param component: the points of the piece
    :param params: frozen autoencoder parameters
    :param seed: seed of the resampling
    :param merged: flag of the resulting part
    :raise DegeneratePartError: if all points of the piece coincide
    :return: the latent part
    """
    component = validate_cloud(component, "component")
    if float(np.ptp(component, axis=0).max()) <= 1e-12:
        raise DegeneratePartError("component")
    canonical, pose = canonicalize_cloud(resample(component, params.config.n_points, seed))
    mean, _ = encode(params, canonical)
    return LatentPart(mean, pose.t, pose.yaw, merged)


def merge_symmetric(state: DecompositionState, params: VaeParams, tau_cc: float, tau: float) -> DecompositionState:
    """
    Merge free parts that touch their own mirror image into one self-symmetric part.

    :param state: a state with decoded cache
    :param params: frozen autoencoder parameters
    :param tau_cc: contact distance between a part and its mirror
    :param tau: contact distance of the overlap penalty
    :return: the state with merged parts, refreshed if anything changed
    """
    if state.symmetry is None or not state.mirrored:
        return state
    parts = list(state.parts)
    changed = False
    for position, index in enumerate(state.mirrored):
        free, mirror = state.decoded[index], state.decoded[state.k + position]
        if float(nearest(free, mirror)[0].min()) >= tau_cc:
            continue
        union = np.concatenate([free, mirror])
        try:
            parts[index] = reencode(union, params, np.random.SeedSequence([state.seed, state.generation, index]), True)
        except DegeneratePartError:
            logger.warning("Target %s: part %d touches its mirror but is degenerate.", state.target_id, index)
            continue
        changed = True
        logger.info("Target %s: merged part %d with its mirror.", state.target_id, index)
    if not changed:
        return state
    return refresh(replace(state, parts=tuple(parts), decoded=()), params, tau)


def phase2_shift(state: DecompositionState, params: VaeParams, config: ScheduleConfig) -> DecompositionState:
    """
    One part shift of a state.

    Merges symmetric pairs, swaps in the least covered points, segments the
    target, filters every segment, keeps its farthest component and re-encodes
    it. Parts whose segment is empty or degenerate keep their variables.

    :param state: a state with decoded cache
    :param params: frozen autoencoder parameters
    :param config: schedule thresholds
    :return: the state with k new latent parts and refreshed cache
    """
    state = merge_symmetric(state, params, config.tau_cc, config.tau_overlap)
    target = state.target
    q = pairwise_distances(target, state.coverage_clouds())
    swap = swap_least_covered(target, q, config.swap_frac)
    segments = nn_segment(target, [], swap.q)
    filtered = filter_covered(segments, swap.q, config.p_filter, config.global_filter)
    parts = list(state.parts)
    for index, segment in enumerate(filtered):
        if len(segment) == 0:
            logger.warning("Target %s: part %d covers no points and is kept.", state.target_id, index)
            continue
        others = [filtered[other] for other in range(len(filtered)) if other != index]
        pooled = target[np.concatenate(others)] if others else None
        component = farthest_component(target[segment], pooled, config.tau_cc)
        merged = state.parts[index].merged and index != swap.column
        seed = np.random.SeedSequence([state.seed, state.generation, len(state.history), index])
        try:
            parts[index] = reencode(component, params, seed, merged)
        except DegeneratePartError:
            logger.warning("Target %s: component of part %d is degenerate; part kept.", state.target_id, index)
    shifted = refresh(replace(state, parts=tuple(parts), decoded=()), params, config.tau_overlap)
    logger.debug("Target %s: part shift changed loss %.6f -> %.6f", state.target_id, state.loss, shifted.loss)
    return replace(shifted, history=shifted.history + (shifted.loss,))
