"""
Exact nearest-neighbour kernels shared by the differentiation engine and the
geometry module.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt
from scipy.spatial.distance import cdist

from tno.shape.part_assembly.numcore.utils import Tensor

DEFAULT_CHUNK = 4096


def nearest(
    queries: Tensor, points: Tensor, chunk: int = DEFAULT_CHUNK
) -> tuple[Tensor, npt.NDArray[np.intp]]:
    """
    Find, for every query point, the nearest point of a second set.

    Distances are computed exactly in blocks of `chunk` query rows. Ties are
    resolved towards the lowest point index.

    :param queries: query points of shape (N, 3)
    :param points: candidate points of shape (M, 3)
    :param chunk: number of query rows per distance block
    :raise ValueError: if one of the sets is empty
    :return: the nearest distances (N,) and the indices of the nearest points (N,)
    """
    if len(queries) == 0 or len(points) == 0:
        raise ValueError(f"cannot match {len(queries)} query points against {len(points)} points")
    distances = np.empty(len(queries))
    indices = np.empty(len(queries), dtype=np.intp)
    for start in range(0, len(queries), chunk):
        block = cdist(queries[start : start + chunk], points)
        arg = np.argmin(block, axis=1)
        indices[start : start + chunk] = arg
        distances[start : start + chunk] = block[np.arange(len(block)), arg]
    return distances, indices
