"""
Tests of the Chamfer distance and the point-to-part distance matrix against
brute-force computations.
"""

from __future__ import annotations

import numpy as np
import pytest

from tno.shape.part_assembly.geom import (
    EmptyPointCloudError,
    RigidPose,
    apply_pose,
    chamfer,
    one_sided_chamfer,
    pairwise_distances,
)

CHAMFER_EXAMPLES = [
    ([[0.0, 0.0, 0.0]], [[1.0, 0.0, 0.0]], 2.0),
    ([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]], [[0.0, 0.0, 0.0]], 1.0),
    ([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], 0.0),
]


def brute_force_chamfer(first: np.ndarray, second: np.ndarray) -> float:
    """
    Chamfer distance from the full distance matrix.

    :param first: cloud A
    :param second: cloud B
    :return: the Chamfer distance
    """
    full = np.sqrt(((first[:, None, :] - second[None, :, :]) ** 2).sum(axis=-1))
    return float(full.min(axis=1).mean() + full.min(axis=0).mean())


@pytest.mark.parametrize("first, second, expected", CHAMFER_EXAMPLES)
def test_chamfer_examples(first: list[list[float]], second: list[list[float]], expected: float) -> None:
    """
    Hand-computed Chamfer distances.

    :param first: cloud A
    :param second: cloud B
    :param expected: the distance
    """
    assert chamfer(np.array(first), np.array(second)) == pytest.approx(expected, abs=1e-15)


def test_chamfer_matches_brute_force() -> None:
    """
    The chunked nearest-neighbour search equals the full distance matrix on random pairs.
    """
    rng = np.random.default_rng(0)
    for _ in range(100):
        first = rng.normal(size=(int(rng.integers(1, 257)), 3))
        second = rng.normal(size=(int(rng.integers(1, 257)), 3))
        assert abs(chamfer(first, second) - brute_force_chamfer(first, second)) <= 1e-12


def test_chamfer_properties() -> None:
    """
    Chamfer distance is symmetric, non-negative and invariant under a common rigid motion.
    """
    rng = np.random.default_rng(1)
    first, second = rng.normal(size=(40, 3)), rng.normal(size=(25, 3))
    assert chamfer(first, second) == pytest.approx(chamfer(second, first), abs=1e-15)
    assert chamfer(first, second) > 0
    pose = RigidPose((0.3, -1.2, 4.0), 2.1)
    assert chamfer(apply_pose(first, pose), apply_pose(second, pose)) == pytest.approx(
        chamfer(first, second), abs=1e-9
    )


def test_chamfer_rejects_empty() -> None:
    """
    An empty cloud is an error.
    """
    with pytest.raises(EmptyPointCloudError):
        chamfer(np.zeros((0, 3)), np.zeros((1, 3)))


def test_pairwise_examples() -> None:
    """
    Hand-computed point-to-part distances.
    """
    origin = np.zeros((1, 3))
    np.testing.assert_array_equal(pairwise_distances(origin, [origin]), [[0.0]])
    np.testing.assert_allclose(pairwise_distances(origin, [np.array([[3.0, 4.0, 0.0]])]), [[5.0]])


def test_pairwise_matches_double_loop() -> None:
    """
    The distance matrix equals an explicit double loop over points and part points.
    """
    rng = np.random.default_rng(2)
    points = rng.normal(size=(50, 3))
    parts = [rng.normal(size=(20, 3)), rng.normal(size=(20, 3))]
    expected = np.empty((50, 2))
    for row, point in enumerate(points):
        for column, part in enumerate(parts):
            expected[row, column] = min(float(np.sqrt(((point - other) ** 2).sum())) for other in part)
    np.testing.assert_allclose(pairwise_distances(points, parts), expected, rtol=0, atol=1e-12)


def test_pairwise_consistent_with_chamfer() -> None:
    """
    Row minima of the point-to-part matrix reproduce the one-sided Chamfer term to the pooled parts.
    """
    rng = np.random.default_rng(3)
    points = rng.normal(size=(60, 3))
    parts = [rng.normal(size=(15, 3)) + shift for shift in (0.0, 2.0, -2.0)]
    matrix = pairwise_distances(points, parts)
    assert matrix.min(axis=1).mean() == pytest.approx(one_sided_chamfer(points, np.concatenate(parts)), abs=1e-12)


def test_pairwise_rejects_empty_part_list() -> None:
    """
    At least one part is required.
    """
    with pytest.raises(ValueError, match="empty"):
        pairwise_distances(np.zeros((2, 3)), [])
