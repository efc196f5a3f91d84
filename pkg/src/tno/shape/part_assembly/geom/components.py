"""
Connected components of the epsilon-graph of a point cloud.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as csgraph_components
from scipy.spatial import cKDTree

from tno.shape.part_assembly.geom.types import PointCloud, validate_cloud


def connected_components(points: PointCloud, tau_cc: float) -> npt.NDArray[np.intp]:
    """
    Label the components of the graph with an edge between every two points
    closer than `tau_cc`.

    Labels are numbered in order of the smallest point index they contain, so
    point 0 is always in component 0.

    :param points: the cloud
    :param tau_cc: strict distance threshold of an edge
    :raise ValueError: if the threshold is not positive
    :return: component label per point
    """
    if tau_cc <= 0:
        raise ValueError(f"tau_cc must be positive, got {tau_cc}")
    points = validate_cloud(points)
    pairs = cKDTree(points).query_pairs(r=tau_cc, output_type="ndarray")
    if len(pairs):
        lengths = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=1)
        pairs = pairs[lengths < tau_cc]
    pairs = pairs.reshape(-1, 2)
    adjacency = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(points), len(points)))
    _, raw = csgraph_components(adjacency, directed=False)
    _, first_index = np.unique(raw, return_index=True)
    rank = np.argsort(np.argsort(first_index))
    return rank[raw].astype(np.intp)


def component_sizes(labels: npt.NDArray[np.intp]) -> npt.NDArray[np.intp]:
    """
    Number of points per component label.

    :param labels: output of `connected_components`
    :return: sizes indexed by label
    """
    return np.bincount(labels)
