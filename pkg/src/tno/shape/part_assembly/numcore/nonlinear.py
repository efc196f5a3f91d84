"""
Nonlinear operations of the differentiation engine: activations, elementwise
products, batch normalization and max pooling over points.
"""

from __future__ import annotations

import logging
import math
import sys
from collections.abc import MutableMapping

import numpy as np

from tno.shape.part_assembly.numcore.base import Operation
from tno.shape.part_assembly.numcore.utils import Shape, Tensor

if sys.version_info < (3, 12):
    from typing_extensions import override
else:
    from typing import override

logger = logging.getLogger(__name__)

DEFAULT_LEAKY_SLOPE = 0.01
DEFAULT_BN_MOMENTUM = 0.1
DEFAULT_BN_EPS = 1e-5


class LeakyRelu(Operation):
    """
    Leaky rectifier `x if x > 0 else slope * x`.

    At the kink the derivative is taken to be `slope`.
    """

    kind = "leaky-relu"
    arity = 1

    def __init__(self, slope: float = DEFAULT_LEAKY_SLOPE) -> None:
        super().__init__()
        self.slope = float(slope)

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        return shapes[0]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        x = values[0]
        return np.where(x > 0, x, self.slope * x)

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return (grad * np.where(values[0] > 0, 1.0, self.slope),)

    def describe(self) -> str:
        return f"{self.kind}, slope={self.slope}"


class Mul(Operation):
    """
    Elementwise product of two tensors of identical shape.
    """

    kind = "mul"
    arity = 2

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        if shapes[0] != shapes[1]:
            raise ValueError(f"operand shapes differ: {shapes[0]} and {shapes[1]}")
        return shapes[0]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return values[0] * values[1]

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return grad * values[1], grad * values[0]


class Exp(Operation):
    """
    Elementwise exponential.
    """

    kind = "exp"
    arity = 1

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        return shapes[0]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        self._out = np.exp(values[0])
        return self._out

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return (grad * self._out,)


class Square(Operation):
    """
    Elementwise square.
    """

    kind = "square"
    arity = 1

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        return shapes[0]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return values[0] * values[0]

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return (2.0 * grad * values[0],)


class BatchNorm(Operation):
    """
    One-dimensional batch normalization over the trailing feature axis.

    Statistics are taken over all leading axes, so the same operation serves
    batches of vectors (batch, features) and batches of point features
    (batch, points, features). In training mode the batch statistics are used
    and the running statistics in `stats` are updated with `momentum`; in
    evaluation mode the running statistics are used and nothing is mutated,
    which makes the operation a fixed affine map.

    The operands are the input, the scale (gamma) and the shift (beta).
    """

    kind = "batchnorm-1d"
    arity = 3

    def __init__(
        self,
        stats: MutableMapping[str, Tensor],
        mean_key: str,
        var_key: str,
        momentum: float = DEFAULT_BN_MOMENTUM,
        eps: float = DEFAULT_BN_EPS,
    ) -> None:
        super().__init__()
        self.stats = stats
        self.mean_key = mean_key
        self.var_key = var_key
        self.momentum = float(momentum)
        self.eps = float(eps)

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        x, gamma, beta = shapes
        if len(x) < 2:
            raise ValueError(f"input must have a batch axis, got shape {x}")
        features = (x[-1],)
        if gamma != features or beta != features:
            raise ValueError(f"scale and shift must have shape {features}, got {gamma} and {beta}")
        if self.stats[self.mean_key].shape != features or self.stats[self.var_key].shape != features:
            raise ValueError(f"running statistics must have shape {features}")
        return x

    @override
    def forward(self, *values: Tensor) -> Tensor:
        x, gamma, beta = values
        axes = tuple(range(x.ndim - 1))
        if self.training:
            count = math.prod(x.shape[:-1])
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            unbiased = var * count / (count - 1) if count > 1 else var
            self.stats[self.mean_key] = (1.0 - self.momentum) * self.stats[self.mean_key] + self.momentum * mean
            self.stats[self.var_key] = (1.0 - self.momentum) * self.stats[self.var_key] + self.momentum * unbiased
        else:
            mean = self.stats[self.mean_key]
            var = self.stats[self.var_key]
        self._inv_std = 1.0 / np.sqrt(var + self.eps)
        self._xhat = (x - mean) * self._inv_std
        self._trained = self.training
        return gamma * self._xhat + beta

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        x, gamma, _ = values
        axes = tuple(range(x.ndim - 1))
        grad_gamma = (grad * self._xhat).sum(axis=axes)
        grad_beta = grad.sum(axis=axes)
        grad_xhat = grad * gamma
        if not self._trained:
            return grad_xhat * self._inv_std, grad_gamma, grad_beta
        count = math.prod(x.shape[:-1])
        grad_x = (
            self._inv_std
            / count
            * (
                count * grad_xhat
                - grad_xhat.sum(axis=axes)
                - self._xhat * (grad_xhat * self._xhat).sum(axis=axes)
            )
        )
        return grad_x, grad_gamma, grad_beta

    def describe(self) -> str:
        return f"{self.kind}, momentum={self.momentum}, eps={self.eps}"


class MaxPool(Operation):
    """
    Maximum over the point axis: (points, features) -> (features,) and
    (batch, points, features) -> (batch, features).

    The gradient flows to the first point attaining the maximum.
    """

    kind = "max-pool"
    arity = 1

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        if len(shapes[0]) not in (2, 3):
            raise ValueError(f"input must have rank 2 or 3, got shape {shapes[0]}")
        return shapes[0][:-2] + shapes[0][-1:]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        x = values[0]
        self._argmax = np.argmax(x, axis=-2)
        return np.take_along_axis(x, self._argmax[..., None, :], axis=-2)[..., 0, :]

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        result = np.zeros_like(values[0])
        np.put_along_axis(result, self._argmax[..., None, :], grad[..., None, :], axis=-2)
        return (result,)
