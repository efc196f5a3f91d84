"""
Geometric value types: point clouds, yaw poses and vertical symmetry planes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from tno.shape.part_assembly.geom.exceptions import EmptyPointCloudError
from tno.shape.part_assembly.numcore.utils import Tensor, all_finite, as_tensor

PointCloud = Tensor
"""Array of shape (N, 3) with finite coordinates in normalized dataset units."""

UP_AXIS = 1


def validate_cloud(points: Any, what: str = "points") -> PointCloud:
    """
    Convert a value into a point cloud and check its invariants.

    :param points: array-like of shape (N, 3)
    :param what: name of the argument, used in error messages
    :raise EmptyPointCloudError: if the cloud has no points
    :raise ValueError: if the shape is wrong or a coordinate is not finite
    :return: the points as a contiguous float64 array
    """
    cloud = as_tensor(points)
    if cloud.ndim != 2 or cloud.shape[1] != 3:
        if cloud.size == 0:
            raise EmptyPointCloudError(what)
        raise ValueError(f"`{what}` must have shape (N, 3), got {cloud.shape}")
    if len(cloud) == 0:
        raise EmptyPointCloudError(what)
    if not all_finite(cloud):
        raise ValueError(f"`{what}` contains non-finite coordinates")
    return cloud


def yaw_matrix(yaw: float) -> Tensor:
    """
    Rotation matrix about the up axis, counterclockwise when viewed from +y.

    :param yaw: angle in radians
    :return: the 3x3 rotation matrix
    """
    cos, sin = math.cos(yaw), math.sin(yaw)
    return np.array([[cos, 0.0, sin], [0.0, 1.0, 0.0], [-sin, 0.0, cos]])


@dataclass(frozen=True)
class RigidPose:
    """
    Translation plus rotation about the up axis.

    The yaw is stored as given (unwrapped); it acts modulo 2 pi.
    """

    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    yaw: float = 0.0

    def __post_init__(self) -> None:
        translation = tuple(float(value) for value in self.translation)
        if len(translation) != 3:
            raise ValueError(f"translation must have three components, got {self.translation}")
        if not all(math.isfinite(value) for value in (*translation, self.yaw)):
            raise ValueError("pose components must be finite")
        object.__setattr__(self, "translation", translation)
        object.__setattr__(self, "yaw", float(self.yaw))

    @property
    def t(self) -> Tensor:
        """
        Return the translation as an array.

        :return: the translation vector
        """
        return np.array(self.translation)

    def matrix(self) -> Tensor:
        """
        Return the rotation part of the pose.

        :return: the 3x3 rotation matrix
        """
        return yaw_matrix(self.yaw)

    def inverse(self) -> RigidPose:
        """
        Return the pose that undoes this pose.

        :return: the inverse pose
        """
        back = yaw_matrix(-self.yaw) @ self.t
        return RigidPose(tuple(-back), -self.yaw)

    def compose(self, inner: RigidPose) -> RigidPose:
        """
        Return the pose that applies `inner` first and this pose second.

        :param inner: the pose applied first
        :return: the composed pose
        """
        return RigidPose(tuple(self.matrix() @ inner.t + self.t), self.yaw + inner.yaw)

    def to_dict(self) -> dict[str, Any]:
        """
        Return a JSON-compatible representation.

        :return: dictionary with keys `t` and `r`
        """
        return {"t": list(self.translation), "r": self.yaw}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RigidPose:
        """
        Create a pose from its JSON-compatible representation.

        :param data: dictionary with keys `t` and `r`
        :return: the pose
        """
        return cls(tuple(data["t"]), data["r"])


@dataclass(frozen=True)
class SymmetryPlane:
    """
    Vertical plane through `point` with a horizontal unit `normal`.
    """

    point: tuple[float, float, float]
    normal: tuple[float, float, float]

    def __post_init__(self) -> None:
        point = tuple(float(value) for value in self.point)
        normal = tuple(float(value) for value in self.normal)
        if len(point) != 3 or len(normal) != 3:
            raise ValueError("plane point and normal must have three components")
        if abs(math.hypot(*normal) - 1.0) > 1e-9:
            raise ValueError(f"plane normal must have unit length, got {normal}")
        if abs(normal[UP_AXIS]) > 1e-12:
            raise ValueError(f"plane normal must be perpendicular to the up axis, got {normal}")
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "normal", normal)

    @property
    def n(self) -> Tensor:
        """
        Return the normal as an array.

        :return: the unit normal
        """
        return np.array(self.normal)

    def reflection(self) -> tuple[Tensor, Tensor]:
        """
        Return the reflection across the plane as an affine map `p @ M.T + c`.

        :return: the matrix M and the offset c
        """
        normal = self.n
        matrix = np.eye(3) - 2.0 * np.outer(normal, normal)
        offset = 2.0 * float(normal @ np.array(self.point)) * normal
        return matrix, offset

    def to_dict(self) -> dict[str, Any]:
        """
        Return a JSON-compatible representation.

        :return: dictionary with keys `point` and `normal`
        """
        return {"point": list(self.point), "normal": list(self.normal)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SymmetryPlane:
        """
        Create a plane from its JSON-compatible representation.

        :param data: dictionary with keys `point` and `normal`
        :return: the plane
        """
        return cls(tuple(data["point"]), tuple(data["normal"]))
