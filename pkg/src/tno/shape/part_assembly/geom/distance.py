"""
Chamfer distance and point-to-part distance matrices.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from tno.shape.part_assembly.geom.types import PointCloud, validate_cloud
from tno.shape.part_assembly.numcore.kernels import nearest
from tno.shape.part_assembly.numcore.utils import Tensor


def chamfer(first: PointCloud, second: PointCloud) -> float:
    """
    Symmetric Chamfer distance with non-squared distances and per-cloud means.

    :param first: cloud A
    :param second: cloud B
    :raise EmptyPointCloudError: if a cloud is empty
    :return: mean_a min_b |a - b| + mean_b min_a |a - b|
    """
    first = validate_cloud(first, "first")
    second = validate_cloud(second, "second")
    return float(nearest(first, second)[0].mean() + nearest(second, first)[0].mean())


def one_sided_chamfer(source: PointCloud, target: PointCloud) -> float:
    """
    Mean distance from every point of `source` to its nearest point in `target`.

    :param source: cloud whose points are averaged over
    :param target: cloud that is searched
    :return: the one-sided Chamfer term
    """
    return float(nearest(validate_cloud(source, "source"), validate_cloud(target, "target"))[0].mean())


def pairwise_distances(points: PointCloud, parts: Sequence[PointCloud]) -> Tensor:
    """
    Distance from every point to every part.

    :param points: cloud of N points
    :param parts: list of k part clouds
    :raise ValueError: if the list of parts is empty
    :return: matrix Q of shape (N, k) with Q[i, j] the distance of point i to its nearest point of part j
    """
    points = validate_cloud(points)
    if len(parts) == 0:
        raise ValueError("the list of parts is empty")
    result = np.empty((len(points), len(parts)))
    for column, part in enumerate(parts):
        result[:, column] = nearest(points, validate_cloud(part, f"parts[{column}]"))[0]
    return result
