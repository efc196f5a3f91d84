"""
Export of assemblies as colored point clouds.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path

import numpy as np
import numpy.typing as npt

from tno.shape.part_assembly.geom import PointCloud
from tno.shape.part_assembly.partvae import PartLibrary
from tno.shape.part_assembly.pipeline.cloudio import write_ply
from tno.shape.part_assembly.retrieval import Assembly

logger = logging.getLogger(__name__)

PALETTE = np.array(
    [
        [31, 119, 180],
        [255, 127, 14],
        [44, 160, 44],
        [214, 39, 40],
        [148, 103, 189],
        [140, 86, 75],
        [227, 119, 194],
        [127, 127, 127],
        [188, 189, 34],
        [23, 190, 207],
    ],
    dtype=np.uint8,
)
UNASSIGNED = np.array([0, 0, 0], dtype=np.uint8)


def part_colors(labels: npt.NDArray[np.intp]) -> npt.NDArray[np.uint8]:
    """
    :param labels: part index per point, -1 for none
    :return: RGB color per point, cycling through the palette
    """
    colors = PALETTE[np.mod(labels, len(PALETTE))]
    colors[labels < 0] = UNASSIGNED
    return colors


def export_assembly(
    assembly: Assembly,
    target: PointCloud,
    library: PartLibrary,
    directory: str | os.PathLike[str],
    binary: bool = True,
) -> list[Path]:
    """
    Write the target colored by segment, the posed parts colored alike and the manifest.

    The files are `<target id>-segments.ply`, `<target id>-parts.ply` and
    `<target id>.json`.

    :param assembly: the assembly
    :param target: the target cloud the segments index into
    :param library: the library the parts were retrieved from
    :param directory: destination directory, created if needed
    :param binary: binary little-endian PLY instead of ASCII
    :return: the paths written
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = assembly.target_id
    segments = write_ply(
        target, directory / f"{stem}-segments.ply", part_colors(assembly.labels(len(target))), binary
    )
    paths = [segments]
    if assembly.parts:
        clouds = [part.posed(library) for part in assembly.parts]
        labels = np.concatenate([np.full(len(cloud), index, dtype=np.intp) for index, cloud in enumerate(clouds)])
        paths.append(write_ply(np.concatenate(clouds), directory / f"{stem}-parts.ply", part_colors(labels), binary))
    paths.append(assembly.save(directory / f"{stem}.json"))
    logger.info("Exported assembly of %s to %s.", stem, directory)
    return paths
