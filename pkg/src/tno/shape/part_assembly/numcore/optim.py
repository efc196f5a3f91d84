"""
Bias-corrected Adam over named parameter tensors.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field, replace

import numpy as np

from tno.shape.part_assembly.numcore.utils import Tensor, all_finite

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdamState:
    """
    Moment estimates and step counter of the Adam optimizer.
    """

    step: int = 0
    m: Mapping[str, Tensor] = field(default_factory=dict)
    v: Mapping[str, Tensor] = field(default_factory=dict)
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    skipped: tuple[tuple[int, str], ...] = ()
    """(step, parameter) pairs whose update was skipped because of a non-finite gradient."""

    def __post_init__(self) -> None:
        if self.step < 0:
            raise ValueError(f"step must be non-negative, got {self.step}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f"betas must lie in [0, 1), got {self.beta1} and {self.beta2}")


def adam_update(
    params: Mapping[str, Tensor], grads: Mapping[str, Tensor], state: AdamState, lr: float
) -> tuple[dict[str, Tensor], AdamState]:
    """
    Perform one Adam step.

    Parameters without a gradient are left untouched. A parameter whose
    gradient is not finite is skipped for this step; its moments are kept and
    the skip is recorded in the returned state.

    :param params: current parameter values
    :param grads: gradients per parameter name
    :param state: optimizer state before the step
    :param lr: learning rate, zero leaves all parameters unchanged
    :raise ValueError: if the learning rate is negative or shapes disagree
    :return: the updated parameters and the updated state
    """
    if lr < 0:
        raise ValueError(f"learning rate must be non-negative, got {lr}")
    step = state.step + 1
    correction1 = 1.0 - state.beta1**step
    correction2 = 1.0 - state.beta2**step
    new_params = dict(params)
    first = dict(state.m)
    second = dict(state.v)
    skipped = list(state.skipped)
    for name, grad in grads.items():
        if name not in params:
            continue
        value = params[name]
        if np.shape(grad) != np.shape(value):
            raise ValueError(f"gradient of {name!r} has shape {np.shape(grad)}, expected {np.shape(value)}")
        if not all_finite(np.asarray(grad)):
            logger.warning("Skipping Adam update of %r at step %d: non-finite gradient.", name, step)
            skipped.append((step, name))
            continue
        m_prev = first.get(name, np.zeros_like(value))
        v_prev = second.get(name, np.zeros_like(value))
        m_new = state.beta1 * m_prev + (1.0 - state.beta1) * grad
        v_new = state.beta2 * v_prev + (1.0 - state.beta2) * (grad * grad)
        first[name] = m_new
        second[name] = v_new
        m_hat = m_new / correction1
        v_hat = v_new / correction2
        new_params[name] = value - lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return new_params, replace(state, step=step, m=first, v=second, skipped=tuple(skipped))


class Adam:
    """
    Stateful convenience wrapper around `adam_update`.
    """

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
        """
        Create an optimizer with fresh moment estimates.

        :param lr: learning rate
        :param beta1: decay rate of the first moment
        :param beta2: decay rate of the second moment
        :param eps: denominator offset
        """
        self.lr = lr
        self.state = AdamState(beta1=beta1, beta2=beta2, eps=eps)

    def step(self, params: Mapping[str, Tensor], grads: Mapping[str, Tensor]) -> dict[str, Tensor]:
        """
        Perform one step and keep the new state.

        :param params: current parameter values
        :param grads: gradients per parameter name
        :return: the updated parameters
        """
        new_params, self.state = adam_update(params, grads, self.state, self.lr)
        return new_params

    def reset(self) -> None:
        """
        Forget all moment estimates.
        """
        self.state = AdamState(beta1=self.state.beta1, beta2=self.state.beta2, eps=self.state.eps)
