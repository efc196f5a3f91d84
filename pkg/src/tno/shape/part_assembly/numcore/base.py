"""
Generic operation functionality for the reverse-mode differentiation engine.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import ClassVar

from tno.shape.part_assembly.numcore.utils import Shape, Tensor

logger = logging.getLogger(__name__)


class Operation(ABC):
    """
    Abstract base class for the operations of a computation graph.

    An operation maps a fixed number of operand tensors to one output tensor.
    Subclasses implement the shape rule, the forward computation and the
    vector-Jacobian product. Operations may cache intermediate results of the
    last `forward` call for use in `backward`, so one instance belongs to
    exactly one graph node.
    """

    kind: ClassVar[str] = "operation"
    """Name of the operation kind, used in error messages."""
    arity: ClassVar[int | None] = None
    """Number of operands, or None for a variable number of operands."""

    def __init__(self) -> None:
        self.training = False
        """Whether the graph is evaluated in training mode."""

    @abstractmethod
    def output_shape(self, *shapes: Shape) -> Shape:
        """
        Derive the output shape from the operand shapes.

        :param shapes: shapes of the operands
        :raise ValueError: if the operand shapes are inconsistent
        :return: the shape of the output
        """

    @abstractmethod
    def forward(self, *values: Tensor) -> Tensor:
        """
        Compute the output of the operation.

        :param values: operand values
        :return: the output value
        """

    @abstractmethod
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        """
        Propagate the gradient of the output back to the operands.

        Must be called after `forward` was called with the same operand values.

        :param grad: gradient of the seed with respect to the output
        :param values: operand values of the last forward call
        :return: the gradient with respect to every operand, None for operands
            that do not receive a gradient
        """

    def check_arity(self, count: int) -> None:
        """
        Check the number of operands.

        :param count: the number of operands supplied
        :raise ValueError: if the number of operands does not match the arity
        """
        if self.arity is not None and count != self.arity:
            raise ValueError(f"expects {self.arity} operands, got {count}")

    def describe(self) -> str:
        """
        Return a short description of the operation and its attributes.

        :return: the description
        """
        return self.kind

    def __str__(self) -> str:
        return f"{self.__class__.__name__}({self.describe()})"

    __repr__ = __str__


def require_last_dim(shape: Shape, size: int, what: str) -> None:
    """
    Check the size of the trailing dimension of a shape.

    :param shape: shape to check
    :param size: expected size of the last dimension
    :param what: name of the operand, used in the error message
    :raise ValueError: if the trailing dimension differs
    """
    if len(shape) == 0 or shape[-1] != size:
        raise ValueError(f"{what} must have trailing dimension {size}, got shape {shape}")
