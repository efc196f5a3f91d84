"""
Minimum-area bounding rectangles in the horizontal plane (yaw-only oriented
bounding boxes), by rotating calipers over the convex hull of the xz
projection.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from tno.shape.part_assembly.geom.types import PointCloud, validate_cloud
from tno.shape.part_assembly.numcore.utils import Tensor

QUARTER_TURN = math.pi / 2
COINCIDENT_TOL = 1e-12


def _canonical_xz(xz: Tensor, yaw: float) -> Tensor:
    """
    Rotate xz coordinates by `-yaw`, the inverse of a pose with that yaw.
    """
    cos, sin = math.cos(yaw), math.sin(yaw)
    return np.stack([cos * xz[:, 0] - sin * xz[:, 1], sin * xz[:, 0] + cos * xz[:, 1]], axis=1)


def _normalize_yaw(angle: float) -> float:
    angle = math.fmod(angle, QUARTER_TURN)
    if angle < 0:
        angle += QUARTER_TURN
    if angle > QUARTER_TURN - 1e-12:
        angle = 0.0
    return angle


def _candidate_yaws(xz: Tensor) -> list[float]:
    try:
        hull = xz[ConvexHull(xz).vertices]
    except (QhullError, ValueError):
        # collinear: the only edge direction is the line itself
        far = int(np.argmax(np.linalg.norm(xz - xz[0], axis=1)))
        hull = xz[[0, far]]
    edges = np.roll(hull, -1, axis=0) - hull
    edges = edges[np.linalg.norm(edges, axis=1) > COINCIDENT_TOL]
    yaws = {_normalize_yaw(math.atan2(-dz, dx)) for dx, dz in edges}
    return sorted(yaws | {0.0})


def yaw_obb(points: PointCloud) -> tuple[Tensor, float, Tensor]:
    """
    Yaw-oriented bounding box of minimal footprint.

    The box is the minimum-area rectangle around the xz projection combined
    with the vertical extent. `yaw` is the pose angle of the box frame, so
    rotating the points by `-yaw` makes the box axis-aligned. It is normalized
    to [0, pi/2); among rectangles of equal area the smallest yaw wins.

    :param points: the cloud
    :return: box center, yaw in radians and extents along the box axes (x, y, z)
    """
    points = validate_cloud(points)
    xz = points[:, [0, 2]]
    y_low, y_high = float(points[:, 1].min()), float(points[:, 1].max())
    if float(np.ptp(xz, axis=0).max()) <= COINCIDENT_TOL:
        center = np.array([xz[0, 0], 0.5 * (y_low + y_high), xz[0, 1]])
        return center, 0.0, np.array([0.0, y_high - y_low, 0.0])

    best: tuple[float, float, Tensor, Tensor] | None = None
    for yaw in _candidate_yaws(xz):
        canonical = _canonical_xz(xz, yaw)
        low, high = canonical.min(axis=0), canonical.max(axis=0)
        area = float(np.prod(high - low))
        scale = max(area, COINCIDENT_TOL)
        if best is None or area < best[0] - 1e-9 * scale:
            best = (area, yaw, low, high)
    assert best is not None
    _, yaw, low, high = best
    mid = 0.5 * (low + high)
    cos, sin = math.cos(yaw), math.sin(yaw)
    center = np.array([cos * mid[0] + sin * mid[1], 0.5 * (y_low + y_high), -sin * mid[0] + cos * mid[1]])
    extents = np.array([high[0] - low[0], y_high - y_low, high[1] - low[1]])
    return center, yaw, extents
