"""
Tests of point-cloud and mesh files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
import trimesh

from tno.shape.part_assembly.pipeline import IngestError, load_geometry, read_raw, write_cloud, write_ply, write_raw

CLOUD = np.random.default_rng(3).uniform(-0.5, 0.5, size=(50, 3))


def test_raw_round_trip(tmp_path: Path) -> None:
    """
    A raw cloud reads back at single precision.

    :param tmp_path: temporary directory
    """
    path = write_raw(CLOUD, tmp_path / "cloud.pts")
    loaded = read_raw(path)
    assert loaded.dtype == np.float64
    np.testing.assert_array_equal(loaded, CLOUD.astype(np.float32).astype(np.float64))


def test_raw_truncated(tmp_path: Path) -> None:
    """
    A truncated raw cloud is refused.

    :param tmp_path: temporary directory
    """
    path = write_raw(CLOUD, tmp_path / "cloud.pts")
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(IngestError, match="truncated"):
        read_raw(path)


def test_raw_bad_magic(tmp_path: Path) -> None:
    """
    A file of another kind is refused.

    :param tmp_path: temporary directory
    """
    path = tmp_path / "other.pts"
    path.write_bytes(b"not a cloud at all")
    with pytest.raises(IngestError, match="not a raw point-cloud file"):
        read_raw(path)


@pytest.mark.parametrize("binary", [True, False])
def test_ply_cloud(tmp_path: Path, binary: bool) -> None:
    """
    A PLY cloud without faces loads as points.

    :param tmp_path: temporary directory
    :param binary: binary or ASCII encoding
    """
    path = write_ply(CLOUD, tmp_path / "cloud.ply", binary=binary)
    loaded = load_geometry(path)
    assert isinstance(loaded, np.ndarray)
    np.testing.assert_allclose(loaded, CLOUD, atol=1e-6)


def test_mesh_file(tmp_path: Path) -> None:
    """
    A file with faces loads as a mesh.

    :param tmp_path: temporary directory
    """
    path = tmp_path / "box.stl"
    trimesh.creation.box(extents=(0.2, 0.3, 0.4)).export(str(path))
    loaded = load_geometry(path)
    assert isinstance(loaded, trimesh.Trimesh)
    assert loaded.is_watertight


def test_unknown_suffix(tmp_path: Path) -> None:
    """
    Clouds are only written as PLY or raw files.

    :param tmp_path: temporary directory
    """
    with pytest.raises(ValueError, match="suffix"):
        write_cloud(CLOUD, tmp_path / "cloud.xyz")
