"""
Rigid yaw poses and plane reflections of point clouds.
"""

from __future__ import annotations

from tno.shape.part_assembly.geom.types import (
    PointCloud,
    RigidPose,
    SymmetryPlane,
    validate_cloud,
)


def apply_pose(points: PointCloud, pose: RigidPose) -> PointCloud:
    """
    Rotate the points about the up axis by the pose's yaw, then translate them.

    :param points: cloud to transform
    :param pose: the pose
    :return: the transformed cloud
    """
    points = validate_cloud(points)
    return points @ pose.matrix().T + pose.t


def apply_inverse_pose(points: PointCloud, pose: RigidPose) -> PointCloud:
    """
    Undo `apply_pose`: translate by `-t`, then rotate by `-r`.

    :param points: cloud to transform
    :param pose: the pose to undo
    :return: the transformed cloud
    """
    points = validate_cloud(points)
    return (points - pose.t) @ pose.matrix()


def reflect_points(points: PointCloud, plane: SymmetryPlane) -> PointCloud:
    """
    Mirror the points across a plane.

    :param points: cloud to reflect
    :param plane: the mirror plane
    :return: the reflected cloud
    """
    points = validate_cloud(points)
    matrix, offset = plane.reflection()
    return points @ matrix.T + offset
