"""
Detection of a vertical bilateral symmetry plane.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
from scipy.spatial import cKDTree

from tno.shape.part_assembly.geom.transforms import reflect_points
from tno.shape.part_assembly.geom.types import (
    PointCloud,
    SymmetryPlane,
    validate_cloud,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymmetryConfig:
    """
    Parameters of the symmetry plane search.
    """

    enabled: bool = True
    candidates: int = 16
    relative_tol: float = 0.02
    """Overlap tolerance as a fraction of the target's bounding-box diagonal."""
    overlap_frac: float = 0.9
    refine: bool = False
    """Narrow down the yaw of the best fan plane, for planes off the fan."""

    def __post_init__(self) -> None:
        if self.candidates < 1:
            raise ValueError(f"candidates must be at least 1, got {self.candidates}")
        if self.relative_tol < 0:
            raise ValueError(f"relative_tol must be non-negative, got {self.relative_tol}")
        if not 0.0 < self.overlap_frac <= 1.0:
            raise ValueError(f"overlap_frac must lie in (0, 1], got {self.overlap_frac}")

    @classmethod
    def dense(cls) -> SymmetryConfig:
        """
        Preset for densely sampled targets.

        :return: the configuration
        """
        return cls()

    @classmethod
    def sparse(cls) -> SymmetryConfig:
        """
        Preset with a looser tolerance for sparsely sampled categories.

        :return: the configuration
        """
        return cls(relative_tol=0.05)

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible representation
        """
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SymmetryConfig:
        """
        :param data: JSON-compatible representation
        :return: the configuration
        """
        return cls(**data)


REFINE_ROUNDS = 4
REFINE_STEPS = 8


def yaw_normal(angle: float) -> tuple[float, float, float]:
    """
    :param angle: yaw of the normal, in radians from the x axis towards the z axis
    :return: the horizontal unit normal
    """
    return (math.cos(angle), 0.0, math.sin(angle))


def candidate_normals(count: int = 16) -> list[tuple[float, float, float]]:
    """
    Horizontal unit normals at evenly spaced angles over half a turn.

    :param count: number of candidates
    :return: the normals, starting with (1, 0, 0)
    """
    return [yaw_normal(index * math.pi / count) for index in range(count)]


def reflection_overlap(points: PointCloud, plane: SymmetryPlane, tol: float, tree: cKDTree | None = None) -> float:
    """
    Fraction of reflected points that land within `tol` of an original point.

    :param points: the cloud
    :param plane: candidate mirror plane
    :param tol: distance tolerance
    :param tree: optional search tree over `points`
    :return: the overlap fraction
    """
    tree = tree if tree is not None else cKDTree(points)
    distances, _ = tree.query(reflect_points(points, plane))
    return float(np.mean(distances <= tol))


def mirror_residual(points: PointCloud, plane: SymmetryPlane, tree: cKDTree | None = None) -> float:
    """
    Mean distance from the reflected points to the cloud.

    :param points: the cloud
    :param plane: candidate mirror plane
    :param tree: optional search tree over `points`
    :return: the mean distance, zero for an exact mirror plane
    """
    tree = tree if tree is not None else cKDTree(points)
    distances, _ = tree.query(reflect_points(points, plane))
    return float(np.mean(distances))


def refine_plane(
    points: PointCloud, plane: SymmetryPlane, span: float, rounds: int = REFINE_ROUNDS, tree: cKDTree | None = None
) -> SymmetryPlane:
    """
    Narrow down the yaw of a vertical plane by minimizing the mirror residual.

    Every round samples `2 * REFINE_STEPS` angles within `span` of the current
    angle and moves to the best one, then shrinks the span to the sampling
    step. The current angle is kept unless another is strictly better.

    :param points: the cloud
    :param plane: the starting plane
    :param span: half-width of the first round, in radians
    :param rounds: number of rounds
    :param tree: optional search tree over `points`
    :return: the refined plane through the same point
    """
    tree = tree if tree is not None else cKDTree(points)
    start = math.atan2(plane.normal[2], plane.normal[0])
    angle = best_angle = start
    best = mirror_residual(points, plane, tree)
    for _ in range(rounds):
        step = span / REFINE_STEPS
        for offset in range(-REFINE_STEPS, REFINE_STEPS + 1):
            if offset == 0:
                continue
            candidate = angle + offset * step
            residual = mirror_residual(points, SymmetryPlane(plane.point, yaw_normal(candidate)), tree)
            if residual < best:
                best_angle, best = candidate, residual
        angle, span = best_angle, step
    if best_angle == start:
        return plane
    return SymmetryPlane(plane.point, yaw_normal(best_angle))


def detect_symmetry_plane(
    points: PointCloud,
    overlap_tol: float | None = None,
    overlap_frac: float = 0.9,
    candidates: int = 16,
    refine: bool = False,
) -> SymmetryPlane | None:
    """
    Find the vertical plane through the centroid under which the cloud is most
    nearly mirror-invariant.

    Ties between candidates go to the lowest candidate index. With `refine`,
    the yaw of the best candidate is narrowed down within one fan step on
    either side; the refined plane replaces it unless its overlap is lower.

    :param points: target cloud
    :param overlap_tol: tolerance of the overlap test, by default 2% of the bounding-box diagonal
    :param overlap_frac: minimal overlap fraction to accept the best plane
    :param candidates: number of candidate normals
    :param refine: whether to refine the best candidate off the fan
    :return: the best plane, or None if its overlap is below `overlap_frac`
    """
    points = validate_cloud(points)
    centroid = tuple(points.mean(axis=0))
    if overlap_tol is None:
        overlap_tol = 0.02 * float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    tree = cKDTree(points)
    best_plane: SymmetryPlane | None = None
    best_overlap = -1.0
    for normal in candidate_normals(candidates):
        plane = SymmetryPlane(centroid, normal)
        overlap = reflection_overlap(points, plane, overlap_tol, tree)
        logger.debug("Symmetry candidate %s: overlap %.4f", normal, overlap)
        if overlap > best_overlap:
            best_plane, best_overlap = plane, overlap
    if refine and best_plane is not None:
        refined = refine_plane(points, best_plane, math.pi / candidates, tree=tree)
        refined_overlap = reflection_overlap(points, refined, overlap_tol, tree)
        if refined_overlap >= best_overlap:
            best_plane, best_overlap = refined, refined_overlap
    if best_plane is None or best_overlap < overlap_frac:
        return None
    logger.info("Detected symmetry plane with normal %s (overlap %.3f).", best_plane.normal, best_overlap)
    return best_plane


def detect_with_config(points: PointCloud, config: SymmetryConfig) -> SymmetryPlane | None:
    """
    Run `detect_symmetry_plane` with the tolerance of a configuration.

    :param points: target cloud
    :param config: search parameters
    :return: the detected plane or None, always None when detection is disabled
    """
    if not config.enabled:
        return None
    points = validate_cloud(points)
    diagonal = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    return detect_symmetry_plane(
        points, config.relative_tol * diagonal, config.overlap_frac, config.candidates, config.refine
    )
