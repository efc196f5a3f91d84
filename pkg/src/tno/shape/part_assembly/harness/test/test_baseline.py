"""
Tests of the brute-force baseline.
"""

from __future__ import annotations

import numpy as np
import pytest

from tno.shape.part_assembly.decomposer import ScheduleConfig
from tno.shape.part_assembly.geom import RigidPose, apply_pose, chamfer
from tno.shape.part_assembly.harness import bf_baseline, bf_search, matched_budget
from tno.shape.part_assembly.partvae import PartLibrary
from tno.shape.part_assembly.retrieval import EmptyLibraryError, FitConfig

QUICK_FIT = FitConfig(restarts=1, steps=5)


@pytest.fixture(name="target", scope="module")
def fixture_target(box_library: PartLibrary) -> np.ndarray:
    """
    Two boxes of the library placed apart.

    :param box_library: twelve box parts
    :return: the target cloud
    """
    return np.concatenate(
        [
            apply_pose(box_library[4].points, RigidPose((-0.3, 0.0, 0.0), 0.2)),
            apply_pose(box_library[9].points, RigidPose((0.3, 0.0, 0.0), 0.0)),
        ]
    )


def test_search(target: np.ndarray, box_library: PartLibrary) -> None:
    """
    The best distance never increases and the winner is segmented into a partition of the target.

    :param target: the target cloud
    :param box_library: twelve box parts
    """
    assembly, history = bf_search(target, box_library, 2, 5, seed=3, config=QUICK_FIT, target_id="pair")
    assert len(history) == 5
    assert all(later <= earlier for earlier, later in zip(history, history[1:]))
    assert assembly.target_id == "pair"
    assert assembly.part_count == 2
    assert assembly.vcd == history[-1]
    assert assembly.vcd == pytest.approx(chamfer(assembly.pooled(box_library), target))
    segments = np.sort(np.concatenate([part.segment for part in assembly.parts]))
    np.testing.assert_array_equal(segments, np.arange(len(target)))


def test_more_draws_do_not_hurt(target: np.ndarray, box_library: PartLibrary) -> None:
    """
    With the same seed, a larger budget continues the same draws and ends at most as far.

    :param target: the target cloud
    :param box_library: twelve box parts
    """
    single = bf_baseline(target, box_library, 2, 1, seed=3, config=QUICK_FIT)
    _, history = bf_search(target, box_library, 2, 4, seed=3, config=QUICK_FIT)
    assert single.vcd == history[0]
    assert history[-1] <= single.vcd


def test_reproducible(target: np.ndarray, box_library: PartLibrary) -> None:
    """
    The same seed gives the same parts.

    :param target: the target cloud
    :param box_library: twelve box parts
    """
    first = bf_baseline(target, box_library, 2, 3, seed=8, config=QUICK_FIT)
    second = bf_baseline(target, box_library, 2, 3, seed=8, config=QUICK_FIT)
    assert [part.part_id for part in first.parts] == [part.part_id for part in second.parts]
    assert first.vcd == second.vcd


def test_invalid_arguments(target: np.ndarray, box_library: PartLibrary) -> None:
    """
    The part count and the budget are positive, and the library is not empty.

    :param target: the target cloud
    :param box_library: twelve box parts
    """
    with pytest.raises(ValueError):
        bf_search(target, box_library, 0, 3)
    with pytest.raises(ValueError):
        bf_search(target, box_library, 2, 0)
    with pytest.raises(EmptyLibraryError):
        bf_search(target, PartLibrary(), 2, 3)


def test_matched_budget() -> None:
    """
    The budget matches the gradient steps of decomposition and retrieval.
    """
    schedule = ScheduleConfig(n1=10, n2=1, n3=1)
    fit = FitConfig(restarts=2, steps=5)
    # 2 * (10 + 10) decomposition steps plus (1 + 2) * 12 * 10 fitting steps, at 2 * 10 steps per draw
    assert matched_budget(schedule, (1, 2), 2, 12, fit) == 20
    assert matched_budget(schedule, (1, 2), 3, 12, fit) == 14
    assert matched_budget(schedule, (1,), 50, 1, fit) == 1
