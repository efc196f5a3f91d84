"""
Tests of the Adam optimizer.
"""

from __future__ import annotations

import logging

import numpy as np
import pytest

from tno.shape.part_assembly.numcore import Adam, AdamState, adam_update


def test_first_step_moves_by_learning_rate() -> None:
    """
    With unit gradients, bias correction makes the first step exactly the learning rate.
    """
    params = {"x": np.zeros((2, 3))}
    new_params, state = adam_update(params, {"x": np.ones((2, 3))}, AdamState(), lr=0.008)
    assert np.all(np.abs(new_params["x"] + 0.008) < 1e-6)
    assert state.step == 1


def test_zero_gradient_keeps_parameters() -> None:
    """
    A zero gradient leaves the parameters unchanged but advances the step.
    """
    params = {"x": np.array([1.0, -2.0])}
    new_params, state = adam_update(params, {"x": np.zeros(2)}, AdamState(step=4), lr=0.1)
    np.testing.assert_array_equal(new_params["x"], params["x"])
    assert state.step == 5


def test_zero_learning_rate() -> None:
    """
    A zero learning rate leaves the parameters unchanged.
    """
    params = {"x": np.array([0.3])}
    new_params, _ = adam_update(params, {"x": np.array([2.0])}, AdamState(), lr=0.0)
    np.testing.assert_array_equal(new_params["x"], params["x"])


def test_descends_on_square() -> None:
    """
    Three steps on x squared from 1 strictly decrease x.
    """
    optimizer = Adam(lr=0.1)
    params = {"x": np.array(1.0)}
    trace = [1.0]
    for _ in range(3):
        params = optimizer.step(params, {"x": 2.0 * params["x"]})
        trace.append(float(params["x"]))
    assert all(later < earlier for earlier, later in zip(trace, trace[1:]))


def test_non_finite_gradient_is_skipped(caplog: pytest.LogCaptureFixture) -> None:
    """
    A non-finite gradient skips the update of that parameter only and is recorded.

    :param caplog: captures the emitted warning
    """
    params = {"a": np.array([1.0]), "b": np.array([1.0])}
    grads = {"a": np.array([np.nan]), "b": np.array([1.0])}
    with caplog.at_level(logging.WARNING):
        new_params, state = adam_update(params, grads, AdamState(), lr=0.5)
    np.testing.assert_array_equal(new_params["a"], [1.0])
    assert new_params["b"][0] < 1.0
    assert state.skipped == ((1, "a"),)
    assert "non-finite" in caplog.text
    assert "a" not in state.m


def test_input_is_not_mutated() -> None:
    """
    The update returns new tensors and keeps the input mapping intact.
    """
    params = {"x": np.array([1.0])}
    state = AdamState()
    adam_update(params, {"x": np.array([1.0])}, state, lr=0.1)
    np.testing.assert_array_equal(params["x"], [1.0])
    assert state.step == 0 and not state.m


def test_invalid_arguments() -> None:
    """
    Negative learning rates and mismatching shapes are rejected.
    """
    with pytest.raises(ValueError, match="learning rate"):
        adam_update({"x": np.zeros(1)}, {"x": np.zeros(1)}, AdamState(), lr=-1.0)
    with pytest.raises(ValueError, match="shape"):
        adam_update({"x": np.zeros(1)}, {"x": np.zeros(2)}, AdamState(), lr=0.1)
    with pytest.raises(ValueError, match="step"):
        AdamState(step=-1)
