"""
Uniform sampling of the interior of watertight triangle meshes.

Candidates are drawn uniformly in the bounding box and kept when a ray cast
along +x from the candidate crosses the surface an odd number of times.
"""

from __future__ import annotations

import logging

import numpy as np
import numpy.typing as npt
import trimesh

from tno.shape.part_assembly.geom.exceptions import MeshSamplingError
from tno.shape.part_assembly.geom.types import PointCloud
from tno.shape.part_assembly.numcore.utils import Tensor

logger = logging.getLogger(__name__)

PROBE_SIZE = 4096
MIN_ACCEPTANCE = 1e-4
DEGENERATE_EPS = 1e-10
QUERY_CHUNK = 512
TRIANGLE_CHUNK = 1024
# Offsets applied to the (y, z) origin of a ray that grazes an edge or vertex.
PERTURBATIONS = (
    (0.0, 0.0),
    (1.3e-7, 2.9e-7),
    (-3.1e-7, 1.7e-7),
    (2.3e-7, -4.1e-7),
)


def _usable_triangles(triangles: Tensor) -> tuple[Tensor, Tensor, Tensor, Tensor]:
    """
    Corner, edges and yz-determinant of the triangles whose yz-projection is not degenerate.
    """
    a = triangles[:, 0]
    edge1 = triangles[:, 1] - a
    edge2 = triangles[:, 2] - a
    det = edge1[:, 1] * edge2[:, 2] - edge1[:, 2] * edge2[:, 1]
    usable = np.abs(det) > DEGENERATE_EPS
    return a[usable], edge1[usable], edge2[usable], det[usable]


def _crossings(
    queries: Tensor, a: Tensor, edge1: Tensor, edge2: Tensor, det: Tensor
) -> tuple[npt.NDArray[np.int_], npt.NDArray[np.bool_]]:
    """
    Count +x ray crossings per query and flag queries with ambiguous hits.

    Triangles are visited in blocks of `TRIANGLE_CHUNK`, so intermediates hold
    at most `len(queries) * TRIANGLE_CHUNK` values whatever the face count.
    """
    count = np.zeros(len(queries), dtype=np.int_)
    ambiguous = np.zeros(len(queries), dtype=bool)
    for start in range(0, len(det), TRIANGLE_CHUNK):
        block = slice(start, start + TRIANGLE_CHUNK)
        corner, first, second, area = a[block], edge1[block], edge2[block], det[block]
        rel_y = queries[:, None, 1] - corner[None, :, 1]
        rel_z = queries[:, None, 2] - corner[None, :, 2]
        s = (rel_y * second[None, :, 2] - rel_z * second[None, :, 1]) / area
        t = (first[None, :, 1] * rel_z - first[None, :, 2] * rel_y) / area
        w = 1.0 - s - t
        hit_x = corner[None, :, 0] + s * first[None, :, 0] + t * second[None, :, 0]
        ahead = hit_x > queries[:, None, 0]
        inside = (s >= 0) & (t >= 0) & (w >= 0)
        margin = np.minimum(np.minimum(np.abs(s), np.abs(t)), np.abs(w))
        ambiguous |= np.any(ahead & (margin < DEGENERATE_EPS), axis=1)
        count += np.count_nonzero(inside & ahead, axis=1)
    return count, ambiguous


def contains(mesh: trimesh.Trimesh, points: PointCloud) -> npt.NDArray[np.bool_]:
    """
    Ray-parity inside test of points against a closed mesh.

    A ray whose origin lies on the projection of an edge or vertex is cast
    again from a slightly shifted origin; the shifts are fixed, so the result
    is deterministic.

    :param mesh: closed triangle mesh
    :param points: query points
    :return: boolean mask of the points inside the mesh
    """
    triangles = _usable_triangles(np.asarray(mesh.triangles, dtype=np.float64))
    result = np.zeros(len(points), dtype=bool)
    for start in range(0, len(points), QUERY_CHUNK):
        block = np.array(points[start : start + QUERY_CHUNK], dtype=np.float64)
        pending = np.arange(len(block))
        for offset_y, offset_z in PERTURBATIONS:
            shifted = block[pending].copy()
            shifted[:, 1] += offset_y
            shifted[:, 2] += offset_z
            count, ambiguous = _crossings(shifted, *triangles)
            result[start + pending] = count % 2 == 1
            pending = pending[ambiguous]
            if len(pending) == 0:
                break
    return result


def sample_mesh_interior(mesh: trimesh.Trimesh, n: int, seed: int | np.random.SeedSequence) -> PointCloud:
    """
    Draw `n` points uniformly from the solid interior of a watertight mesh.

    :param mesh: watertight triangle mesh
    :param n: number of points
    :param seed: seed of the random generator
    :raise ValueError: if `n` is not positive
    :raise MeshSamplingError: if the mesh is not watertight or hardly any candidate falls inside
    :return: the sampled points, shape (n, 3)
    """
    if n < 1:
        raise ValueError(f"the number of points must be positive, got {n}")
    if not mesh.is_watertight:
        raise MeshSamplingError("The mesh is not watertight.")
    rng = np.random.default_rng(seed)
    low, high = (np.asarray(bound, dtype=np.float64) for bound in mesh.bounds)

    probe = rng.uniform(low, high, size=(PROBE_SIZE, 3))
    accepted = [probe[contains(mesh, probe)]]
    rate = len(accepted[0]) / PROBE_SIZE
    if rate < MIN_ACCEPTANCE:
        raise MeshSamplingError(f"Only {rate:.2e} of the probe candidates fell inside the mesh.")
    total = len(accepted[0])
    while total < n:
        batch_size = int(min(1_000_000, max(PROBE_SIZE, 1.2 * (n - total) / rate)))
        batch = rng.uniform(low, high, size=(batch_size, 3))
        inside = batch[contains(mesh, batch)]
        accepted.append(inside)
        total += len(inside)
    logger.debug("Interior sampling accepted %.3f of the candidates.", rate)
    return np.concatenate(accepted, axis=0)[:n]
