"""
Preselection of the library parts that are pose-fitted to a segment.
"""

from __future__ import annotations

import math

import numpy as np

from tno.shape.part_assembly.geom import PointCloud, RigidPose, apply_pose, chamfer
from tno.shape.part_assembly.numcore import Tensor
from tno.shape.part_assembly.partvae import (
    PartLibrary,
    VaeParams,
    canonicalize_cloud,
    encode_batch,
    resample,
)
from tno.shape.part_assembly.retrieval.exceptions import EmptyLibraryError

QUARTER_TURNS = tuple(RigidPose((0.0, 0.0, 0.0), index * math.pi / 2) for index in range(4))


def encode_library(library: PartLibrary, params: VaeParams) -> Tensor:
    """
    :param library: the part library
    :param params: frozen autoencoder parameters
    :raise EmptyLibraryError: if the library is empty
    :return: the mean latent code of every part, in library order
    """
    if not len(library):
        raise EmptyLibraryError("cannot encode an empty part library")
    mean, _ = encode_batch(params, library.stack())
    return mean


def latent_candidates(code: Tensor, codes: Tensor, q: int) -> list[int]:
    """
    The library parts whose codes lie closest to a latent code.

    :param code: the latent code
    :param codes: codes of all library parts
    :param q: number of candidates
    :raise EmptyLibraryError: if there are no library codes
    :return: indices of the q nearest parts, closest first, ties to the lower index
    """
    if not len(codes):
        raise EmptyLibraryError()
    distances = np.linalg.norm(np.asarray(codes) - np.asarray(code), axis=1)
    return [int(index) for index in np.argsort(distances, kind="stable")[:q]]


def aligned_distance(points: PointCloud, canonical: PointCloud) -> float:
    """
    Chamfer distance between a canonical cloud and a canonical part, minimized
    over the quarter turns that the canonical frame leaves undetermined.

    :param points: a cloud in its canonical frame
    :param canonical: a canonical library part
    :return: the distance
    """
    return min(chamfer(apply_pose(points, turn), canonical) for turn in QUARTER_TURNS)


def chamfer_candidates(segment: PointCloud, library: PartLibrary, q: int) -> list[int]:
    """
    The library parts closest to a segment after both are brought into their canonical frames.

    :param segment: the segment
    :param library: the part library
    :param q: number of candidates
    :raise EmptyLibraryError: if the library is empty
    :return: indices of the q nearest parts, closest first, ties to the lower index
    """
    if not len(library):
        raise EmptyLibraryError()
    if q >= len(library):
        return list(range(len(library)))
    canonical, _ = canonicalize_cloud(resample(segment, len(library[0].points)))
    distances = np.array([aligned_distance(canonical, entry.points) for entry in library])
    return [int(index) for index in np.argsort(distances, kind="stable")[:q]]
