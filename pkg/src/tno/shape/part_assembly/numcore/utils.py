"""
General utilities for the differentiation engine.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any, Protocol, Union, runtime_checkable

import numpy as np
import numpy.typing as npt

Tensor = npt.NDArray[np.float64]
"""Dense row-major array of 64-bit floats."""
Shape = tuple[int, ...]
"""Concrete shape of a tensor."""
DeclaredShape = tuple[Union[int, None], ...]
"""Shape of a graph input; `None` marks a dimension that is only known at forward time."""

FLOAT_DTYPE = np.float64


@runtime_checkable
class SupportsArray(Protocol):  # pylint: disable=too-few-public-methods
    """
    Protocol used to check whether a value can be converted into a tensor.
    """

    __slots__ = ()

    def __array__(self, *args: Any, **kwargs: Any) -> Any: ...


def as_tensor(value: SupportsArray | Sequence[Any] | float) -> Tensor:
    """
    Convert a value into a contiguous float64 tensor.

    :param value: array-like value
    :return: the value as a tensor
    """
    return np.asarray(value, dtype=FLOAT_DTYPE, order="C")


def all_finite(value: Tensor) -> bool:
    """
    Return whether all entries of the tensor are finite.

    :param value: tensor to check
    :return: True if there are no NaN or infinite entries
    """
    return bool(np.all(np.isfinite(value)))


def shape_matches(actual: Shape, declared: DeclaredShape) -> bool:
    """
    Compare a concrete shape against a declared shape with wildcards.

    :param actual: shape of the supplied tensor
    :param declared: declared shape, `None` entries match any size
    :return: whether the shapes agree
    """
    if len(actual) != len(declared):
        return False
    return all(want is None or want == got for got, want in zip(actual, declared))
