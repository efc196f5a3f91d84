"""
Central finite differences, used as a gradient oracle.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from tno.shape.part_assembly.numcore.exceptions import NonFiniteError
from tno.shape.part_assembly.numcore.utils import Tensor, as_tensor

DEFAULT_STEP = 1e-5


def finite_diff_gradient(f: Callable[[Tensor], float], x: Tensor, h: float = DEFAULT_STEP) -> Tensor:
    """
    Estimate the gradient of a scalar function by central differences.

    :param f: scalar function of a tensor
    :param x: point at which the gradient is estimated
    :param h: step size per coordinate
    :raise NonFiniteError: if `f` is not finite at one of the probe points
    :return: the estimated gradient, with the shape of `x`
    """
    point = as_tensor(x).copy()
    flat = point.reshape(-1)
    result = np.empty_like(flat)
    for index in range(flat.size):
        original = flat[index]
        flat[index] = original + h
        upper = float(f(point))
        flat[index] = original - h
        lower = float(f(point))
        flat[index] = original
        if not (math.isfinite(upper) and math.isfinite(lower)):
            raise NonFiniteError(f"Function is not finite around coordinate {index}.")
        result[index] = (upper - lower) / (2.0 * h)
    return result.reshape(point.shape)


def relative_error(actual: Tensor, expected: Tensor, floor: float = 1e-12) -> float:
    """
    Relative error `|actual - expected| / max(|actual|, |expected|)` in the Euclidean norm.

    :param actual: computed value
    :param expected: reference value
    :param floor: lower bound of the denominator
    :return: the relative error
    """
    actual = as_tensor(actual)
    expected = as_tensor(expected)
    scale = max(float(np.linalg.norm(actual)), float(np.linalg.norm(expected)), floor)
    return float(np.linalg.norm(actual - expected)) / scale
