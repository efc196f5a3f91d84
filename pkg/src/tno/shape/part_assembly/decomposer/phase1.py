"""
Random initialization of a decomposition and gradient optimization of the
latent parts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import Final, Literal

import numpy as np

from tno.shape.part_assembly.decomposer.losses import (
    Phase1Objective,
    check_finite,
    refresh,
)
from tno.shape.part_assembly.decomposer.state import DecompositionState, LatentPart
from tno.shape.part_assembly.geom import (
    PointCloud,
    SymmetryConfig,
    SymmetryPlane,
    detect_with_config,
    validate_cloud,
)
from tno.shape.part_assembly.numcore import AdamState, Tensor, adam_update
from tno.shape.part_assembly.partvae import VaeParams

logger = logging.getLogger(__name__)

DETECT: Final = "detect"
"""Marker asking `init_state` to detect the symmetry plane of the target."""


def random_parts(
    target: PointCloud, k: int, latent_dim: int, rng: np.random.Generator
) -> tuple[LatentPart, ...]:
    """
    Draw k latent parts: standard normal codes, translations uniform in the
    target's bounding box and yaws uniform in [0, 2 pi).

    :param target: the target cloud
    :param k: number of parts
    :param latent_dim: size of the codes
    :param rng: random generator
    :return: the parts
    """
    low, high = target.min(axis=0), target.max(axis=0)
    codes = rng.standard_normal((k, latent_dim))
    translations = rng.uniform(low, high, size=(k, 3))
    yaws = rng.uniform(0.0, 2 * math.pi, size=k)
    return tuple(LatentPart(code, translation, float(yaw)) for code, translation, yaw in zip(codes, translations, yaws))


def init_state(
    target: PointCloud,
    k: int,
    params: VaeParams,
    seed: int = 0,
    tau: float = 0.1,
    target_id: str = "target",
    symmetry: SymmetryPlane | None | Literal["detect"] = DETECT,
    symmetry_config: SymmetryConfig | None = None,
) -> DecompositionState:
    """
    Create a randomly initialized decomposition of a target.

    :param target: the target cloud
    :param k: number of free parts
    :param params: frozen autoencoder parameters
    :param seed: seed of the initialization
    :param tau: contact distance of the overlap penalty
    :param target_id: identifier of the target
    :param symmetry: the target's symmetry plane, None for none, or `DETECT`
    :param symmetry_config: parameters of the detection
    :raise ValueError: if k is smaller than one
    :return: the state with its decoded cache
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    target = validate_cloud(target, f"target {target_id}")
    if symmetry == DETECT:
        plane = detect_with_config(target, symmetry_config if symmetry_config is not None else SymmetryConfig())
    else:
        plane = symmetry  # type: ignore[assignment]
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    parts = random_parts(target, k, params.config.latent_dim, rng)
    state = DecompositionState(target_id, target, parts, plane, seed=seed)
    return refresh(state, params, tau)


def rerandomize(state: DecompositionState, params: VaeParams, tau: float) -> DecompositionState:
    """
    Draw fresh latent parts from the next generation of the state's seed stream.

    :param state: the state
    :param params: frozen autoencoder parameters
    :param tau: contact distance of the overlap penalty
    :return: the re-initialized state, keeping target, symmetry plane and history
    """
    generation = state.generation + 1
    rng = np.random.default_rng(np.random.SeedSequence([state.seed, generation]))
    parts = random_parts(state.target, state.k, params.config.latent_dim, rng)
    return refresh(replace(state, parts=parts, generation=generation, decoded=()), params, tau)


def phase1_run(
    state: DecompositionState,
    params: VaeParams,
    n1: int,
    lr: float,
    tau: float,
) -> DecompositionState:
    """
    Run Adam on the codes, translations and yaws of all parts.

    The optimizer starts from fresh moments. The loss of every visited point
    (before each of the `n1` steps and after the last) is appended to the
    history. The point of lowest loss is returned, not the last iterate; a run
    that never improves on its start returns the starting variables. Ties keep
    the earlier point.

    :param state: the starting state
    :param params: frozen autoencoder parameters
    :param n1: number of steps
    :param lr: learning rate
    :param tau: contact distance of the overlap penalty
    :raise NonFiniteLossError: if the loss becomes non-finite
    :return: the lowest-loss state visited by the run, with its decoded cache
    """
    if n1 < 1:
        raise ValueError(f"n1 must be at least 1, got {n1}")
    objective = Phase1Objective.for_state(state, params, tau)
    variables: dict[str, Tensor] = state.variables()
    adam = AdamState()
    history = list(state.history)
    best: tuple[float, dict[str, Tensor], dict[str, Tensor]] | None = None
    for step in range(n1 + 1):
        outputs = objective.evaluate(variables, state.target)
        check_finite(state, objective, outputs)
        loss = float(outputs["loss"])
        history.append(loss)
        if best is None or loss < best[0]:
            best = (loss, variables, outputs)
        if step == n1:
            break
        variables, adam = adam_update(variables, objective.gradients(), adam, lr)
        logger.debug("Target %s step %d: loss %.6f", state.target_id, step, loss)
    assert best is not None
    loss, variables, outputs = best
    result = state.with_variables(variables)
    return replace(
        result,
        history=tuple(history),
        decoded=tuple(np.array(cloud) for cloud in outputs["stack"]),
        loss=loss,
        recon=float(outputs["recon"]),
    )
