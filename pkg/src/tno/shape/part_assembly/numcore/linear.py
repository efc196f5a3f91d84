"""
Linear operations of the differentiation engine.

These operations are linear (or affine) in each operand, so their backward
pass is a fixed linear map of the incoming gradient: dense layers, sums and
differences, scaling, reshaping, gathering, concatenation and constant affine
point maps.
"""

from __future__ import annotations

import logging
import math
import sys
from collections.abc import Sequence

import numpy as np

from tno.shape.part_assembly.numcore.base import Operation, require_last_dim
from tno.shape.part_assembly.numcore.utils import Shape, Tensor, as_tensor

if sys.version_info < (3, 12):
    from typing_extensions import override
else:
    from typing import override

logger = logging.getLogger(__name__)


class Linear(Operation):
    """
    Dense layer `x @ W.T + b` applied to a vector or a batch of vectors.

    The weight has shape (out, in) and the bias has shape (out,).
    """

    kind = "linear"
    arity = 3
    allowed_ranks: tuple[int, ...] = (1, 2)

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        x, weight, bias = shapes
        if len(x) not in self.allowed_ranks:
            raise ValueError(f"input must have rank in {self.allowed_ranks}, got shape {x}")
        if len(weight) != 2:
            raise ValueError(f"weight must be a matrix, got shape {weight}")
        require_last_dim(x, weight[1], "input")
        if bias != (weight[0],):
            raise ValueError(f"bias must have shape ({weight[0]},), got {bias}")
        return x[:-1] + (weight[0],)

    @override
    def forward(self, *values: Tensor) -> Tensor:
        x, weight, bias = values
        return x @ weight.T + bias

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        x, weight, _ = values
        flat_x = x.reshape(-1, weight.shape[1])
        flat_grad = grad.reshape(-1, weight.shape[0])
        return grad @ weight, flat_grad.T @ flat_x, flat_grad.sum(axis=0)


class PointwiseLinear(Linear):
    """
    Dense layer shared over all points of a (batch of) point set(s).

    Equivalent to a one-dimensional convolution with kernel size one over the
    point axis. The input has shape (points, in) or (batch, points, in).
    """

    kind = "pointwise-linear"
    allowed_ranks = (2, 3)


class Add(Operation):
    """
    Elementwise sum of two tensors of identical shape.
    """

    kind = "add"
    arity = 2

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        if shapes[0] != shapes[1]:
            raise ValueError(f"operand shapes differ: {shapes[0]} and {shapes[1]}")
        return shapes[0]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return values[0] + values[1]

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return grad, grad


class Sub(Add):
    """
    Elementwise difference of two tensors of identical shape.
    """

    kind = "sub"

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return values[0] - values[1]

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return grad, -grad


class Scale(Operation):
    """
    Multiplication by a constant scalar.
    """

    kind = "scale"
    arity = 1

    def __init__(self, factor: float) -> None:
        super().__init__()
        self.factor = float(factor)

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        return shapes[0]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return values[0] * self.factor

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return (grad * self.factor,)

    def describe(self) -> str:
        return f"{self.kind}, factor={self.factor}"


class Shift(Operation):
    """
    Addition of a constant scalar.
    """

    kind = "shift"
    arity = 1

    def __init__(self, offset: float) -> None:
        super().__init__()
        self.offset = float(offset)

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        return shapes[0]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return values[0] + self.offset

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return (grad,)

    def describe(self) -> str:
        return f"{self.kind}, offset={self.offset}"


class Reshape(Operation):
    """
    Reshape to a target shape; at most one dimension may be -1.
    """

    kind = "reshape"
    arity = 1

    def __init__(self, shape: Sequence[int]) -> None:
        super().__init__()
        self.shape = tuple(int(dim) for dim in shape)
        if sum(1 for dim in self.shape if dim == -1) > 1:
            raise ValueError("At most one dimension of a reshape can be -1.")

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        size = math.prod(shapes[0])
        known = math.prod(dim for dim in self.shape if dim != -1)
        if -1 in self.shape:
            if known == 0 or size % known != 0:
                raise ValueError(f"cannot reshape {shapes[0]} into {self.shape}")
            return tuple(size // known if dim == -1 else dim for dim in self.shape)
        if known != size:
            raise ValueError(f"cannot reshape {shapes[0]} into {self.shape}")
        return self.shape

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return values[0].reshape(self.shape)

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return (grad.reshape(values[0].shape),)

    def describe(self) -> str:
        return f"{self.kind}, shape={self.shape}"


class Take(Operation):
    """
    Gather entries along the leading axis.
    """

    kind = "take"
    arity = 1

    def __init__(self, indices: Sequence[int]) -> None:
        super().__init__()
        self.indices = np.asarray(indices, dtype=np.intp)

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        if len(shapes[0]) == 0:
            raise ValueError("cannot take from a scalar")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= shapes[0][0]):
            raise ValueError(f"indices out of range for leading dimension {shapes[0][0]}")
        return (len(self.indices),) + shapes[0][1:]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return values[0][self.indices]

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        result = np.zeros_like(values[0])
        np.add.at(result, self.indices, grad)
        return (result,)

    def describe(self) -> str:
        return f"{self.kind}, indices={self.indices.tolist()}"


class Concat(Operation):
    """
    Concatenation of any number of tensors along the leading axis.
    """

    kind = "concat"

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        if not shapes:
            raise ValueError("expects at least one operand")
        tails = {shape[1:] for shape in shapes}
        if len(tails) != 1 or any(len(shape) == 0 for shape in shapes):
            raise ValueError(f"operands must agree beyond the leading axis, got {list(shapes)}")
        return (sum(shape[0] for shape in shapes),) + shapes[0][1:]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return np.concatenate(values, axis=0)

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        bounds = np.cumsum([value.shape[0] for value in values])[:-1]
        return tuple(np.split(grad, bounds, axis=0))


class Affine(Operation):
    """
    Constant affine map `p @ M.T + c` applied to every 3D point.
    """

    kind = "affine"
    arity = 1

    def __init__(self, matrix: Tensor, offset: Tensor) -> None:
        super().__init__()
        self.matrix = as_tensor(matrix).reshape(3, 3)
        self.offset = as_tensor(offset).reshape(3)

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        require_last_dim(shapes[0], 3, "points")
        return shapes[0]

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return values[0] @ self.matrix.T + self.offset

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return (grad @ self.matrix,)


class Sum(Operation):
    """
    Sum of all entries, producing a scalar.
    """

    kind = "sum"
    arity = 1

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        return ()

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return np.asarray(values[0].sum())

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return (np.full(values[0].shape, float(grad)),)


class Mean(Operation):
    """
    Mean of all entries, producing a scalar.
    """

    kind = "mean"
    arity = 1

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        if math.prod(shapes[0]) == 0:
            raise ValueError("mean of an empty tensor")
        return ()

    @override
    def forward(self, *values: Tensor) -> Tensor:
        return np.asarray(values[0].mean())

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        return (np.full(values[0].shape, float(grad) / values[0].size),)
