"""
Tests of ingestion, normalization and dataset bundles.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
import trimesh

from tno.shape.part_assembly.partvae import PartLibrary
from tno.shape.part_assembly.pipeline import (
    Dataset,
    IngestConfig,
    IngestError,
    ingest,
    read_raw,
    stream_seed,
    write_raw,
)

CONFIG = IngestConfig(target_points=128, part_points=64, test_frac=0.5, seed=5)


def box_cloud(extents: tuple[float, float, float], count: int, seed: int, offset: float = 0.0) -> np.ndarray:
    """
    Points uniform in an axis-aligned box.

    :param extents: side lengths of the box
    :param count: number of points
    :param seed: random seed
    :param offset: shift of the box along every axis
    :return: the cloud
    """
    half = np.asarray(extents) / 2
    return np.random.default_rng(seed).uniform(-half, half, size=(count, 3)) + offset


@pytest.fixture(name="inputs")
def fixture_inputs(tmp_path: Path) -> tuple[list[Path], list[Path]]:
    """
    Four raw target clouds of different sizes and three raw part clouds.

    :param tmp_path: temporary directory
    :return: the target files and the part files
    """
    targets = [
        write_raw(box_cloud((1.0 + index, 0.5, 0.8), 200, index, offset=index), tmp_path / f"t{index}.pts")
        for index in range(4)
    ]
    parts = [
        write_raw(box_cloud((0.3, 0.2, 0.1 + 0.1 * index), 100, 10 + index), tmp_path / f"p{index}.pts")
        for index in range(3)
    ]
    return targets, parts


def test_stream_seed() -> None:
    """
    Derived seeds are reproducible and differ between names and master seeds.
    """
    assert stream_seed(0, "chair") == stream_seed(0, "chair")
    assert stream_seed(0, "chair") != stream_seed(0, "table")
    assert stream_seed(0, "chair") != stream_seed(1, "chair")
    assert 0 <= stream_seed(7, "x") < 2**63


def test_normalization(inputs: tuple[list[Path], list[Path]]) -> None:
    """
    Targets are centered and share one scale that brings the largest diagonal to one.

    :param inputs: target and part files
    """
    dataset = ingest(*inputs, CONFIG)
    diagonals = [float(np.linalg.norm(np.ptp(cloud, axis=0))) for _, cloud in dataset.targets]
    assert max(diagonals) == pytest.approx(1.0)
    assert all(diagonal <= 1.0 + 1e-12 for diagonal in diagonals)
    for _, cloud in dataset.targets:
        np.testing.assert_allclose((cloud.min(axis=0) + cloud.max(axis=0)) / 2, 0.0, atol=1e-12)


def test_clouds_only_normalized(inputs: tuple[list[Path], list[Path]]) -> None:
    """
    Point-cloud inputs keep all their points; only centering and scaling apply.

    :param inputs: target and part files
    """
    dataset = ingest(*inputs, CONFIG)
    raw = read_raw(inputs[0][2])
    expected = (raw - (raw.min(axis=0) + raw.max(axis=0)) / 2) * dataset.scale
    np.testing.assert_allclose(dataset.target("t2"), expected, atol=1e-12)


def test_library_and_splits(inputs: tuple[list[Path], list[Path]]) -> None:
    """
    Parts are canonicalized at the requested size and half of the targets are test targets.

    :param inputs: target and part files
    """
    dataset = ingest(*inputs, CONFIG)
    assert dataset.library.ids == ["p0", "p1", "p2"]
    assert all(len(entry.points) == 64 for entry in dataset.library)
    assert sorted(dataset.splits.values()) == ["test", "test", "train", "train"]
    assert len(dataset.split("test").targets) == 2


def test_deterministic(inputs: tuple[list[Path], list[Path]]) -> None:
    """
    Ingesting twice gives the same dataset.

    :param inputs: target and part files
    """
    first, second = ingest(*inputs, CONFIG), ingest(*inputs, CONFIG)
    assert first.splits == second.splits
    for (_, one), (_, other) in zip(first.targets, second.targets):
        np.testing.assert_array_equal(one, other)
    np.testing.assert_array_equal(first.library.stack(), second.library.stack())


def test_mesh_targets_are_sampled(tmp_path: Path) -> None:
    """
    Watertight meshes are sampled to the requested number of points, reproducibly.

    :param tmp_path: temporary directory
    """
    path = tmp_path / "box.stl"
    trimesh.creation.box(extents=(0.4, 0.2, 0.3)).export(str(path))
    first = ingest([path], [], CONFIG)
    second = ingest([path], [], CONFIG)
    assert first.target("box").shape == (128, 3)
    np.testing.assert_array_equal(first.target("box"), second.target("box"))


def test_open_mesh(tmp_path: Path) -> None:
    """
    A mesh with a hole is refused, citing the file.

    :param tmp_path: temporary directory
    """
    box = trimesh.creation.box(extents=(0.4, 0.2, 0.3))
    mesh = trimesh.Trimesh(vertices=box.vertices, faces=box.faces[1:])
    path = tmp_path / "open.stl"
    mesh.export(str(path))
    with pytest.raises(IngestError, match="open.stl"):
        ingest([path], [], CONFIG)


def test_duplicate_names(tmp_path: Path) -> None:
    """
    Two inputs with the same name are refused.

    :param tmp_path: temporary directory
    """
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    first = write_raw(box_cloud((1.0, 1.0, 1.0), 20, 0), tmp_path / "a" / "chair.pts")
    second = write_raw(box_cloud((1.0, 1.0, 1.0), 20, 1), tmp_path / "b" / "chair.pts")
    with pytest.raises(IngestError, match="same name"):
        ingest([first, second], [], CONFIG)


def test_bundle_round_trip(tmp_path: Path, inputs: tuple[list[Path], list[Path]]) -> None:
    """
    A saved bundle loads back at single precision with its splits, scale and part poses.

    :param tmp_path: temporary directory
    :param inputs: target and part files
    """
    dataset = ingest(*inputs, CONFIG)
    dataset.save(tmp_path / "bundle")
    loaded = Dataset.load(tmp_path / "bundle")
    assert loaded.ids == dataset.ids
    assert loaded.splits == dataset.splits
    assert loaded.scale == dataset.scale
    for (_, one), (_, other) in zip(loaded.targets, dataset.targets):
        np.testing.assert_array_equal(one, other.astype(np.float32).astype(np.float64))
    assert [entry.pose for entry in loaded.library] == [entry.pose for entry in dataset.library]


def test_bundle_without_index(tmp_path: Path) -> None:
    """
    A directory without an index is not a bundle.

    :param tmp_path: temporary directory
    """
    with pytest.raises(IngestError):
        Dataset.load(tmp_path)


def test_unknown_split() -> None:
    """
    Split tags are restricted to source, train and test.
    """
    with pytest.raises(ValueError, match="split"):
        Dataset((("a", np.zeros((2, 3))),), PartLibrary([]), splits={"a": "dev"})
