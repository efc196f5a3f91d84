"""
Evaluation metrics: surface and volumetric Chamfer distances of assemblies,
the crust approximation of surfaces and the purity of segments.
"""

from __future__ import annotations

import numpy as np

from tno.shape.part_assembly.decomposer import nn_segment
from tno.shape.part_assembly.geom import PointCloud, apply_pose, chamfer, validate_cloud
from tno.shape.part_assembly.partvae import PartLibrary
from tno.shape.part_assembly.retrieval import Assembly

CD_SCALE = 100.0
"""Reported Chamfer distances are multiplied by this factor."""
CRUST_VOXEL = 0.05


def crust_surface(points: PointCloud, voxel: float = CRUST_VOXEL) -> PointCloud:
    """
    Approximate the surface of a volumetric cloud by its crust.

    The cloud is binned into cubic voxels; the points of every occupied voxel
    that has an unoccupied face neighbour are kept.

    :param points: the volumetric cloud
    :param voxel: edge length of the voxels
    :raise ValueError: if `voxel` is not positive
    :return: the crust points
    """
    if voxel <= 0:
        raise ValueError(f"voxel must be positive, got {voxel}")
    points = validate_cloud(points)
    cells = np.floor((points - points.min(axis=0)) / voxel).astype(np.int64) + 1
    dims = cells.max(axis=0) + 2
    codes = np.ravel_multi_index(cells.T, dims)
    occupied = np.unique(codes)
    boundary = np.zeros(len(points), dtype=bool)
    for axis in range(3):
        for step in (-1, 1):
            neighbour = cells.copy()
            neighbour[:, axis] += step
            boundary |= ~np.isin(np.ravel_multi_index(neighbour.T, dims), occupied)
    return points[boundary]


def _posed_surfaces(assembly: Assembly, library: PartLibrary, voxel: float) -> PointCloud:
    clouds = []
    for part in assembly.parts:
        entry = library.get(part.part_id)
        surface = entry.surface if entry.surface is not None else crust_surface(entry.points, voxel)
        clouds.append(apply_pose(surface, part.pose))
    return np.concatenate(clouds)


def metrics(
    assembly: Assembly,
    library: PartLibrary,
    target_volume: PointCloud,
    target_surface: PointCloud | None = None,
    voxel: float = CRUST_VOXEL,
) -> tuple[float, float]:
    """
    Surface and volumetric Chamfer distances between an assembly and its target.

    Parts and targets without surface samples use their crust instead.
    Both values are multiplied by `CD_SCALE`.

    :param assembly: an assembly with at least one part
    :param library: the library the parts were retrieved from
    :param target_volume: volumetric sampling of the target
    :param target_surface: surface sampling of the target
    :param voxel: voxel size of the crust approximation
    :raise ValueError: if the assembly has no parts
    :return: SCD and VCD
    """
    if not assembly.parts:
        raise ValueError(f"assembly of {assembly.target_id} has no parts")
    surface = target_surface if target_surface is not None else crust_surface(target_volume, voxel)
    scd = chamfer(_posed_surfaces(assembly, library, voxel), surface)
    vcd = chamfer(assembly.pooled(library), target_volume)
    return CD_SCALE * scd, CD_SCALE * vcd


def segment_purity(assembly: Assembly, truth: Assembly, target: PointCloud, library: PartLibrary) -> float:
    """
    Mean over predicted segments of the fraction of their points whose
    ground-truth part is the part retrieved for the segment.

    Ground-truth parts are read from the segments of `truth`; points outside
    every ground-truth segment are given to the closest posed ground-truth part.

    :param assembly: the predicted assembly
    :param truth: the ground-truth assembly of the same target
    :param target: the target cloud
    :param library: the library of both assemblies
    :return: the purity in [0, 1], 1.0 for an assembly without non-empty segments
    """
    owner = truth.labels(len(target))
    missing = np.flatnonzero(owner < 0)
    if len(missing):
        posed = [part.posed(library) for part in truth.parts]
        for index, segment in enumerate(nn_segment(target[missing], posed)):
            owner[missing[segment]] = index
    truth_ids = np.array([part.part_id for part in truth.parts])[owner]
    fractions = [
        float(np.mean(truth_ids[part.segment] == part.part_id)) for part in assembly.parts if len(part.segment)
    ]
    return float(np.mean(fractions)) if fractions else 1.0
