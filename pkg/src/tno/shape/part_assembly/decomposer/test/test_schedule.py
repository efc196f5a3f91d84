"""
Tests of the schedule configuration and of the nested schedule.
"""

from __future__ import annotations

from typing import Any

import numpy as np
import pytest

from tno.shape.part_assembly.decomposer import (
    ScheduleConfig,
    ScheduleProgress,
    borrow,
    finish,
    init_state,
    phase1_run,
    run_schedule,
    shift_rounds,
)
from tno.shape.part_assembly.geom import RigidPose, apply_pose
from tno.shape.part_assembly.partvae import PartLibrary, VaeParams

INVALID_CONFIGS: list[dict[str, Any]] = [
    {"n1": 0},
    {"n3": 0},
    {"p_filter": 1.0},
    {"swap_frac": 0.0},
    {"worst_frac": 1.5},
    {"tau_overlap": 0.0},
    {"final_n1": -1},
]

TINY = ScheduleConfig(n1=4, n2=1, n3=1)


@pytest.fixture(name="posed_part", scope="module")
def fixture_posed_part(box_library: PartLibrary) -> np.ndarray:
    """
    A library part under a pose.

    :param box_library: twelve box parts
    :return: the posed cloud
    """
    return apply_pose(box_library[7].points, RigidPose((0.2, 0.0, -0.1), 0.3))


@pytest.mark.parametrize("overrides", INVALID_CONFIGS)
def test_invalid_config(overrides: dict[str, Any]) -> None:
    """
    Out-of-range counts and fractions are rejected.

    :param overrides: the invalid field values
    """
    with pytest.raises(ValueError):
        ScheduleConfig(**overrides)


def test_config_presets() -> None:
    """
    The desk preset shortens the schedule and phase-one-only switches off the other phases.
    """
    desk = ScheduleConfig.desk()
    assert (desk.n1, desk.n2, desk.n3) == (60, 3, 2)
    assert desk.final_steps == 60
    reduced = desk.phase_one_only()
    assert not reduced.phase2 and not reduced.phase3
    assert ScheduleConfig.from_dict(desk.to_dict()) == desk


def test_schedule_improves_on_initialization(posed_part: np.ndarray, trained_params: VaeParams) -> None:
    """
    The smallest schedule ends below the reconstruction error of its initialization.

    :param posed_part: a posed library part
    :param trained_params: trained reduced parameters
    """
    config = ScheduleConfig(n1=1, n2=1, n3=1)
    initial = init_state(posed_part, 1, trained_params, seed=0, symmetry=None)
    result = run_schedule(posed_part, 1, config, trained_params, seed=0, symmetry=None)
    assert result.loss <= initial.loss
    assert result.k == 1


def test_schedule_returns_best_state(posed_part: np.ndarray, trained_params: VaeParams) -> None:
    """
    The returned loss is not above any logged loss.

    :param posed_part: a posed library part
    :param trained_params: trained reduced parameters
    """
    result = run_schedule(posed_part, 2, TINY, trained_params, seed=1, symmetry=None)
    assert result.history
    assert result.loss <= min(result.history) + 1e-12


def test_schedule_is_deterministic(posed_part: np.ndarray, trained_params: VaeParams) -> None:
    """
    A fixed seed gives identical schedules.

    :param posed_part: a posed library part
    :param trained_params: trained reduced parameters
    """
    first = run_schedule(posed_part, 2, TINY, trained_params, seed=3, symmetry=None)
    second = run_schedule(posed_part, 2, TINY, trained_params, seed=3, symmetry=None)
    np.testing.assert_array_equal(first.codes(), second.codes())
    np.testing.assert_array_equal(first.translations(), second.translations())
    assert first.history == second.history


def test_phase_one_only_schedule(posed_part: np.ndarray, trained_params: VaeParams) -> None:
    """
    Without shift and borrowing the schedule is a chain of gradient runs.

    :param posed_part: a posed library part
    :param trained_params: trained reduced parameters
    """
    config = ScheduleConfig(n1=3, n2=2, n3=1).phase_one_only()
    result = run_schedule(posed_part, 2, config, trained_params, seed=2, symmetry=None)
    state = init_state(posed_part, 2, trained_params, seed=2, tau=config.tau_overlap, symmetry=None)
    for _ in range(3):
        state = phase1_run(state, trained_params, config.n1, config.lr, config.tau_overlap)
    assert result.history == state.history
    assert result.loss == min(state.history)


def test_collection_rounds(box_library: PartLibrary, trained_params: VaeParams) -> None:
    """
    A collection runs shift rounds, borrows between them and finishes every target.

    :param box_library: twelve box parts
    :param trained_params: trained reduced parameters
    """
    config = ScheduleConfig(n1=2, n2=1, n3=1, worst_frac=0.5)
    targets = [box_library[index].points for index in range(3)]
    progresses = [
        ScheduleProgress.start(init_state(target, 1, trained_params, seed=index, symmetry=None))
        for index, target in enumerate(targets)
    ]
    progresses = [shift_rounds(progress, trained_params, config) for progress in progresses]
    progresses = borrow(progresses, np.ones((3, 3)) - np.eye(3), trained_params, config)
    results = [finish(progress, trained_params, config) for progress in progresses]
    assert len(results) == 3
    for progress, result in zip(progresses, results):
        assert result.loss <= progress.best.loss
