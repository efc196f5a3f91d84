"""
Reading and writing point clouds and meshes.

Point clouds are stored as PLY (ASCII or binary little-endian) or as a raw
binary file: the magic bytes, a little-endian u16 format version, a
little-endian u32 point count and the coordinates as little-endian float32.
Both formats store single precision.
"""

from __future__ import annotations

import logging
import os
import struct
from pathlib import Path

import numpy as np
import numpy.typing as npt
import trimesh

from tno.shape.part_assembly.geom import PointCloud
from tno.shape.part_assembly.pipeline.exceptions import IngestError

logger = logging.getLogger(__name__)

RAW_MAGIC = b"PACLD\x00"
RAW_VERSION = 1
RAW_SUFFIX = ".pts"
_RAW_PREFIX = struct.Struct("<HI")


def write_raw(points: PointCloud, path: str | os.PathLike[str]) -> Path:
    """
    :param points: the cloud
    :param path: destination file
    :return: the path written
    """
    path = Path(path)
    points = np.asarray(points)
    with path.open("wb") as handle:
        handle.write(RAW_MAGIC)
        handle.write(_RAW_PREFIX.pack(RAW_VERSION, len(points)))
        handle.write(np.ascontiguousarray(points, dtype="<f4").tobytes())
    return path


def read_raw(path: str | os.PathLike[str]) -> PointCloud:
    """
    :param path: a file written by `write_raw`
    :raise IngestError: if the file is not a raw cloud or is truncated
    :return: the cloud in double precision
    """
    data = Path(path).read_bytes()
    if not data.startswith(RAW_MAGIC):
        raise IngestError(str(path), "not a raw point-cloud file")
    offset = len(RAW_MAGIC)
    if len(data) < offset + _RAW_PREFIX.size:
        raise IngestError(str(path), "truncated header")
    version, count = _RAW_PREFIX.unpack_from(data, offset)
    if version != RAW_VERSION:
        raise IngestError(str(path), f"unsupported raw format version {version}")
    offset += _RAW_PREFIX.size
    if len(data) != offset + 12 * count:
        raise IngestError(str(path), f"expected {count} points, file is truncated or too long")
    return np.frombuffer(data, dtype="<f4", offset=offset).reshape(count, 3).astype(np.float64)


def write_ply(
    points: PointCloud,
    path: str | os.PathLike[str],
    colors: npt.NDArray[np.uint8] | None = None,
    binary: bool = True,
) -> Path:
    """
    :param points: the cloud
    :param path: destination file
    :param colors: optional RGB or RGBA color per point
    :param binary: binary little-endian instead of ASCII
    :return: the path written
    """
    path = Path(path)
    cloud = trimesh.PointCloud(np.asarray(points), colors=colors)
    path.write_bytes(cloud.export(file_type="ply", encoding="binary" if binary else "ascii"))
    return path


def write_cloud(points: PointCloud, path: str | os.PathLike[str]) -> Path:
    """
    Write a cloud in the format named by the file suffix.

    :param points: the cloud
    :param path: destination file, `.ply` or `.pts`
    :raise ValueError: for other suffixes
    :return: the path written
    """
    path = Path(path)
    if path.suffix == RAW_SUFFIX:
        return write_raw(points, path)
    if path.suffix == ".ply":
        return write_ply(points, path)
    raise ValueError(f"unsupported point-cloud suffix {path.suffix!r}")


def load_geometry(path: str | os.PathLike[str]) -> trimesh.Trimesh | PointCloud:
    """
    Load a mesh or a point cloud.

    Raw clouds and PLY files without faces are point clouds; every other file
    that trimesh reads with faces is a mesh.

    :param path: the input file
    :raise IngestError: if the file cannot be read or holds neither points nor faces
    :return: a mesh, or the points of a cloud
    """
    path = Path(path)
    if path.suffix == RAW_SUFFIX:
        return read_raw(path)
    try:
        loaded = trimesh.load(str(path))
    except Exception as error:  # trimesh raises a variety of parser errors
        raise IngestError(str(path), str(error)) from error
    if isinstance(loaded, trimesh.Scene):
        loaded = loaded.dump(concatenate=True)
    if isinstance(loaded, trimesh.Trimesh) and len(loaded.faces):
        return loaded
    vertices = np.asarray(getattr(loaded, "vertices", ()), dtype=np.float64)
    if vertices.ndim != 2 or not len(vertices):
        raise IngestError(str(path), "no points or faces found")
    logger.debug("Loaded %d points from %s.", len(vertices), path)
    return vertices
