"""
Multi-start rigid pose fitting of a library part to a segment of a target.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from tno.shape.part_assembly.geom import (
    PointCloud,
    RigidPose,
    apply_pose,
    chamfer,
    validate_cloud,
)
from tno.shape.part_assembly.numcore import (
    AdamState,
    Chamfer,
    Graph,
    RigidTransform,
    Tensor,
    adam_update,
)
from tno.shape.part_assembly.retrieval.config import FitConfig

logger = logging.getLogger(__name__)


class PoseObjective:
    """
    Chamfer distance between a posed part and a segment as a function of the
    translation and the yaw.
    """

    def __init__(self) -> None:
        graph = Graph()
        points = graph.input("points", (None, 3))
        translation = graph.input("translation", (3,), differentiable=True)
        yaw = graph.input("yaw", (), differentiable=True)
        segment = graph.input("segment", (None, 3))
        posed = graph.apply(RigidTransform(), points, translation, yaw, name="posed")
        graph.output("fit", graph.apply(Chamfer(), posed, segment, name="fit"))
        self.graph = graph

    def evaluate(self, variables: dict[str, Tensor], points: PointCloud, segment: PointCloud) -> float:
        """
        :param variables: translation and yaw
        :param points: the part cloud in its canonical frame
        :param segment: the segment
        :return: the Chamfer distance
        """
        return float(self.graph.forward({**variables, "points": points, "segment": segment})["fit"])

    def gradients(self) -> dict[str, Tensor]:
        """
        :return: gradients of the last evaluation
        """
        return self.graph.backward("fit")


def initial_poses(points: PointCloud, segment: PointCloud, restarts: int) -> list[RigidPose]:
    """
    Evenly spaced yaws, each with the translation that aligns the centroids.

    :param points: the part cloud
    :param segment: the segment
    :param restarts: number of starting poses
    :return: the starting poses
    """
    centroid = segment.mean(axis=0)
    poses = []
    for index in range(restarts):
        yaw = 2 * math.pi * index / restarts
        rotated = apply_pose(points, RigidPose((0.0, 0.0, 0.0), yaw)).mean(axis=0)
        poses.append(RigidPose(tuple(centroid - rotated), yaw))
    return poses


def fit_part_to_segment(
    points: PointCloud, segment: PointCloud, config: FitConfig | None = None
) -> tuple[RigidPose, float]:
    """
    Find the pose under which a part best matches a segment.

    Every starting pose of `initial_poses` is refined by Adam on the Chamfer
    distance. The best pose visited over all starts is returned; ties keep the
    earlier start.

    :param points: the part cloud in its canonical frame
    :param segment: the non-empty segment
    :param config: restarts, steps and learning rate
    :return: the pose and the Chamfer distance of the posed part to the segment
    """
    config = config if config is not None else FitConfig()
    points = validate_cloud(points, "part")
    segment = validate_cloud(segment, "segment")
    objective = PoseObjective()
    best: tuple[float, RigidPose] | None = None
    for start in initial_poses(points, segment, config.restarts):
        variables = {"translation": start.t, "yaw": np.asarray(start.yaw)}
        adam = AdamState()
        for step in range(config.steps + 1):
            fit = objective.evaluate(variables, points, segment)
            if best is None or fit < best[0]:
                best = (fit, RigidPose(tuple(variables["translation"]), float(variables["yaw"])))
            if step == config.steps or config.lr == 0:
                break
            variables, adam = adam_update(variables, objective.gradients(), adam, config.lr)
    assert best is not None
    pose = best[1]
    return pose, chamfer(apply_pose(points, pose), segment)
