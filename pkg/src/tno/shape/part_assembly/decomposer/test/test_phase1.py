"""
Tests of the initialization, the gradient-phase objective and its optimization.
"""

from __future__ import annotations

import numpy as np
import pytest

from tno.shape.part_assembly.decomposer import (
    DecompositionState,
    LatentPart,
    NonFiniteLossError,
    Phase1Objective,
    init_state,
    overlap_penalty,
    phase1_loss,
    phase1_run,
    refresh,
)
from tno.shape.part_assembly.decomposer.losses import overlap_pairs
from tno.shape.part_assembly.geom import RigidPose, SymmetryPlane, apply_pose, reflect_points
from tno.shape.part_assembly.numcore import finite_diff_gradient, relative_error
from tno.shape.part_assembly.partvae import VaeParams, decode

TAU = 0.1

OVERLAP_EXAMPLES = [
    ([[0.0, 0.0, 0.0]], [[0.05, 0.0, 0.0]], 0.05),
    ([[0.0, 0.0, 0.0]], [[0.5, 0.0, 0.0]], 0.0),
    ([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], [[0.0, 0.0, 0.0]], 0.05),
]

X_PLANE = SymmetryPlane((0.0, 0.0, 0.0), (1.0, 0.0, 0.0))


def box_cloud(extents: tuple[float, float, float], count: int, seed: int) -> np.ndarray:
    half = np.asarray(extents) / 2
    return np.random.default_rng(seed).uniform(-half, half, size=(count, 3))


@pytest.fixture(name="target", scope="module")
def fixture_target() -> np.ndarray:
    """
    A box-shaped target away from the origin.

    :return: the target cloud
    """
    return box_cloud((0.6, 0.3, 0.4), 200, seed=5) + np.array([0.5, 0.0, 0.0])


@pytest.mark.parametrize("first, second, expected", OVERLAP_EXAMPLES)
def test_overlap_penalty(first: list[list[float]], second: list[list[float]], expected: float) -> None:
    """
    The overlap penalty is the mean hinge over all cross pairs.

    :param first: first cloud
    :param second: second cloud
    :param expected: the penalty
    """
    assert overlap_penalty(np.array(first), np.array(second), TAU) == pytest.approx(expected)


def test_overlap_pairs_skip_own_mirror() -> None:
    """
    A free part is never paired with its own mirror.
    """
    assert overlap_pairs(2, (0, 1)) == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert not overlap_pairs(1, (0,))


def test_init_is_deterministic(target: np.ndarray, reduced_params: VaeParams) -> None:
    """
    The same seed gives the same initial state.

    :param target: the target cloud
    :param reduced_params: untrained reduced parameters
    """
    first = init_state(target, 3, reduced_params, seed=4, symmetry=None)
    second = init_state(target, 3, reduced_params, seed=4, symmetry=None)
    np.testing.assert_array_equal(first.codes(), second.codes())
    np.testing.assert_array_equal(first.translations(), second.translations())
    np.testing.assert_array_equal(first.yaws(), second.yaws())
    assert first.loss == second.loss


def test_init_translations_in_bounding_box(target: np.ndarray, reduced_params: VaeParams) -> None:
    """
    Initial translations lie in the bounding box of the target and yaws in [0, 2 pi).

    :param target: the target cloud
    :param reduced_params: untrained reduced parameters
    """
    state = init_state(target, 6, reduced_params, seed=0, symmetry=None)
    assert np.all(state.translations() >= target.min(axis=0))
    assert np.all(state.translations() <= target.max(axis=0))
    assert np.all((state.yaws() >= 0) & (state.yaws() < 2 * np.pi))
    assert len(state.decoded) == 6


def test_init_rejects_zero_parts(target: np.ndarray, reduced_params: VaeParams) -> None:
    """
    A decomposition needs at least one part.

    :param target: the target cloud
    :param reduced_params: untrained reduced parameters
    """
    with pytest.raises(ValueError, match="at least 1"):
        init_state(target, 0, reduced_params)


def test_init_detects_symmetry(reduced_params: VaeParams) -> None:
    """
    A mirror-symmetric target carries its detected plane.

    :param reduced_params: untrained reduced parameters
    """
    half = box_cloud((0.2, 0.3, 0.4), 100, seed=8) + np.array([0.4, 0.0, 0.0])
    target = np.concatenate([half, half * np.array([-1.0, 1.0, 1.0])])
    state = init_state(target, 2, reduced_params, seed=0)
    assert state.symmetry is not None
    assert state.mirrored == (0, 1)
    assert len(state.decoded) == 4


def test_single_part_has_no_overlap(target: np.ndarray, reduced_params: VaeParams) -> None:
    """
    One part has no pairs, so the loss equals the reconstruction term.

    :param target: the target cloud
    :param reduced_params: untrained reduced parameters
    """
    state = init_state(target, 1, reduced_params, seed=0, symmetry=None)
    loss, clouds = phase1_loss(state, reduced_params, TAU)
    assert loss == pytest.approx(state.recon)
    assert len(clouds) == 1


def test_mirrors_are_exact_reflections(target: np.ndarray, reduced_params: VaeParams) -> None:
    """
    With a symmetry plane the pooled decoded cloud is invariant under reflection.

    :param target: the target cloud
    :param reduced_params: untrained reduced parameters
    """
    state = init_state(target, 3, reduced_params, seed=2, symmetry=X_PLANE)
    for position, index in enumerate(state.mirrored):
        np.testing.assert_allclose(
            reflect_points(state.decoded[index], X_PLANE), state.decoded[state.k + position], atol=1e-9
        )


@pytest.mark.parametrize("name", ["codes", "translations", "yaws"])
@pytest.mark.parametrize("plane", [None, X_PLANE])
def test_objective_gradient(
    target: np.ndarray, reduced_params: VaeParams, name: str, plane: SymmetryPlane | None
) -> None:
    """
    The gradient of the full objective matches central finite differences.

    :param target: the target cloud
    :param reduced_params: untrained reduced parameters
    :param name: the variable that is checked
    :param plane: symmetry plane of the state
    """
    state = init_state(target, 2, reduced_params, seed=1, symmetry=plane)
    objective = Phase1Objective.for_state(state, reduced_params, TAU)
    variables = state.variables()
    objective.evaluate(variables, target)
    analytic = objective.gradients()[name]

    def loss_at(value: np.ndarray) -> float:
        return float(objective.evaluate({**variables, name: value}, target)["loss"])

    numeric = finite_diff_gradient(loss_at, variables[name], h=1e-6)
    assert relative_error(analytic, numeric) <= 1e-4


def test_zero_learning_rate_keeps_state(target: np.ndarray, reduced_params: VaeParams) -> None:
    """
    Without a step size only the history changes.

    :param target: the target cloud
    :param reduced_params: untrained reduced parameters
    """
    state = init_state(target, 2, reduced_params, seed=0, symmetry=None)
    result = phase1_run(state, reduced_params, n1=3, lr=0.0, tau=TAU)
    np.testing.assert_array_equal(result.codes(), state.codes())
    np.testing.assert_array_equal(result.translations(), state.translations())
    assert len(result.history) == 4
    assert result.loss == state.loss


def test_run_is_deterministic(target: np.ndarray, reduced_params: VaeParams) -> None:
    """
    Two runs from the same state give the same result.

    :param target: the target cloud
    :param reduced_params: untrained reduced parameters
    """
    state = init_state(target, 2, reduced_params, seed=0, symmetry=None)
    first = phase1_run(state, reduced_params, n1=5, lr=0.01, tau=TAU)
    second = phase1_run(state, reduced_params, n1=5, lr=0.01, tau=TAU)
    np.testing.assert_array_equal(first.codes(), second.codes())
    assert first.history == second.history


def test_run_fits_offset_part(trained_params: VaeParams) -> None:
    """
    A decoded part under a small pose offset is pulled onto its target.

    :param trained_params: trained reduced parameters
    """
    code = np.zeros(trained_params.config.latent_dim)
    target = apply_pose(decode(trained_params, code), RigidPose((0.05, 0.0, -0.03), 0.1))
    part = LatentPart(code, np.zeros(3), 0.0)
    state = refresh(DecompositionState("offset", target, (part,)), trained_params, TAU)
    result = phase1_run(state, trained_params, n1=20, lr=0.005, tau=TAU)
    assert result.recon < state.recon
    assert result.loss == min(result.history)


def test_run_returns_best_visited_point(trained_params: VaeParams) -> None:
    """
    A run whose steps only overshoot returns its starting point, not its last iterate.

    :param trained_params: trained reduced parameters
    """
    code = np.zeros(trained_params.config.latent_dim)
    target = apply_pose(decode(trained_params, code), RigidPose((0.05, 0.0, -0.03), 0.1))
    part = LatentPart(code, np.zeros(3), 0.0)
    state = refresh(DecompositionState("overshoot", target, (part,)), trained_params, TAU)
    result = phase1_run(state, trained_params, n1=4, lr=10.0, tau=TAU)
    assert result.history[-1] > result.loss
    assert result.loss == result.history[len(state.history)] == min(result.history)
    np.testing.assert_array_equal(result.codes(), state.codes())
    np.testing.assert_array_equal(result.translations(), state.translations())
    assert result.recon == pytest.approx(state.recon)


def test_non_finite_loss_names_part(target: np.ndarray, reduced_params: VaeParams) -> None:
    """
    A non-finite decoded cloud is reported with its part.

    :param target: the target cloud
    :param reduced_params: untrained reduced parameters
    """
    broken = reduced_params.thaw()
    broken.weights["decoder.out.bias"][0] = np.inf  # type: ignore[index]
    state = init_state(target, 1, reduced_params, seed=0, symmetry=None)
    with pytest.raises(NonFiniteLossError, match="part 0"):
        phase1_loss(state, broken, TAU)
