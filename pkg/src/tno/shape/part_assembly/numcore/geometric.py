"""
Geometric operations of the differentiation engine: Chamfer distance, rigid
yaw transformations and the pairwise overlap hinge.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from tno.shape.part_assembly.numcore.base import Operation, require_last_dim
from tno.shape.part_assembly.numcore.kernels import nearest
from tno.shape.part_assembly.numcore.utils import Shape, Tensor

if sys.version_info < (3, 12):
    from typing_extensions import override
else:
    from typing import override

logger = logging.getLogger(__name__)


def _unit_differences(source: Tensor, target: Tensor) -> Tensor:
    """
    Row-wise `(source - target) / |source - target|`, zero where the points coincide.
    """
    diff = source - target
    norm = np.linalg.norm(diff, axis=1, keepdims=True)
    return np.divide(diff, norm, out=np.zeros_like(diff), where=norm > 0)


class Chamfer(Operation):
    """
    Symmetric Chamfer distance with non-squared distances and per-cloud means.

    Operands of shape (N, 3) and (M, 3) give a single distance; operands of
    shape (B, N, 3) and (B, M, 3) give the mean distance over the batch. The
    gradient of every nearest-neighbour term flows to the selected neighbour
    only.
    """

    kind = "chamfer"
    arity = 2

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        first, second = shapes
        require_last_dim(first, 3, "first cloud")
        require_last_dim(second, 3, "second cloud")
        if len(first) != len(second) or len(first) not in (2, 3):
            raise ValueError(f"clouds must both have rank 2 or both rank 3, got {first} and {second}")
        if len(first) == 3 and first[0] != second[0]:
            raise ValueError(f"batch sizes differ: {first[0]} and {second[0]}")
        if first[-2] == 0 or second[-2] == 0:
            raise ValueError("clouds must be non-empty")
        return ()

    @override
    def forward(self, *values: Tensor) -> Tensor:
        first, second = (value if value.ndim == 3 else value[None] for value in values)
        self._matches = []
        total = 0.0
        for a, b in zip(first, second):
            dist_ab, idx_ab = nearest(a, b)
            dist_ba, idx_ba = nearest(b, a)
            self._matches.append((idx_ab, idx_ba))
            total += dist_ab.mean() + dist_ba.mean()
        return np.asarray(total / len(first))

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        batched = values[0].ndim == 3
        first, second = (value if batched else value[None] for value in values)
        grad_first = np.zeros_like(first)
        grad_second = np.zeros_like(second)
        scale = float(grad) / len(first)
        for item, (a, b) in enumerate(zip(first, second)):
            idx_ab, idx_ba = self._matches[item]
            unit_ab = _unit_differences(a, b[idx_ab]) * (scale / len(a))
            grad_first[item] += unit_ab
            np.add.at(grad_second[item], idx_ab, -unit_ab)
            unit_ba = _unit_differences(b, a[idx_ba]) * (scale / len(b))
            grad_second[item] += unit_ba
            np.add.at(grad_first[item], idx_ba, -unit_ba)
        if not batched:
            return grad_first[0], grad_second[0]
        return grad_first, grad_second


class RigidTransform(Operation):
    """
    Rotation about the vertical (y) axis by a yaw angle followed by a translation.

    A point (x, y, z) maps to (cos r x + sin r z + t_x, y + t_y, -sin r x + cos r z + t_z),
    which is counterclockwise when viewed from +y. The operands are the points
    (n, 3) with translation (3,) and yaw (), or a stack of point sets (k, n, 3)
    with translations (k, 3) and yaws (k,).
    """

    kind = "rigid-transform"
    arity = 3

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        points, translation, yaw = shapes
        require_last_dim(points, 3, "points")
        if len(points) == 2:
            expected = ((3,), ())
        elif len(points) == 3:
            expected = ((points[0], 3), (points[0],))
        else:
            raise ValueError(f"points must have rank 2 or 3, got shape {points}")
        if (translation, yaw) != expected:
            raise ValueError(
                f"translation and yaw must have shapes {expected[0]} and {expected[1]}, got {translation} and {yaw}"
            )
        return points

    @override
    def forward(self, *values: Tensor) -> Tensor:
        points, translation, yaw = values
        cos = np.cos(yaw)[..., None]
        sin = np.sin(yaw)[..., None]
        x, y, z = points[..., 0], points[..., 1], points[..., 2]
        rotated = np.stack([cos * x + sin * z, y, -sin * x + cos * z], axis=-1)
        return rotated + translation[..., None, :]

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        points, _, yaw = values
        cos = np.cos(yaw)[..., None]
        sin = np.sin(yaw)[..., None]
        x, z = points[..., 0], points[..., 2]
        grad_x, grad_y, grad_z = grad[..., 0], grad[..., 1], grad[..., 2]
        grad_points = np.stack([cos * grad_x - sin * grad_z, grad_y, sin * grad_x + cos * grad_z], axis=-1)
        grad_translation = grad.sum(axis=-2)
        grad_yaw = (grad_x * (-sin * x + cos * z) + grad_z * (-cos * x - sin * z)).sum(axis=-1)
        return grad_points, grad_translation, grad_yaw


class Overlap(Operation):
    """
    Mean hinge overlap between selected pairs of a stack of point sets.

    For a pair (a, b) the hinge is the mean over all cross pairs of points of
    `max(0, tau - |p - q|)`; the result is the mean over the selected pairs and
    zero when no pairs are selected.
    """

    kind = "overlap"
    arity = 1

    def __init__(self, pairs: Sequence[tuple[int, int]], tau: float) -> None:
        super().__init__()
        if tau <= 0:
            raise ValueError(f"overlap threshold must be positive, got {tau}")
        self.pairs = [(int(a), int(b)) for a, b in pairs]
        self.tau = float(tau)

    @override
    def output_shape(self, *shapes: Shape) -> Shape:
        stack = shapes[0]
        if len(stack) != 3:
            raise ValueError(f"expects a stack of point sets, got shape {stack}")
        require_last_dim(stack, 3, "stack")
        for a, b in self.pairs:
            if not (0 <= a < stack[0] and 0 <= b < stack[0]) or a == b:
                raise ValueError(f"invalid pair ({a}, {b}) for a stack of {stack[0]} sets")
        return ()

    @override
    def forward(self, *values: Tensor) -> Tensor:
        stack = values[0]
        if not self.pairs:
            return np.asarray(0.0)
        total = 0.0
        for a, b in self.pairs:
            total += np.maximum(0.0, self.tau - cdist(stack[a], stack[b])).mean()
        return np.asarray(total / len(self.pairs))

    @override
    def backward(self, grad: Tensor, *values: Tensor) -> tuple[Tensor | None, ...]:
        stack = values[0]
        result = np.zeros_like(stack)
        if not self.pairs:
            return (result,)
        for a, b in self.pairs:
            first, second = stack[a], stack[b]
            distances = cdist(first, second)
            weight = float(grad) / (len(self.pairs) * distances.size)
            active = (distances < self.tau) & (distances > 0)
            coeff = np.zeros_like(distances)
            coeff[active] = -weight / distances[active]
            result[a] += first * coeff.sum(axis=1, keepdims=True) - coeff @ second
            result[b] += second * coeff.sum(axis=0)[:, None] - coeff.T @ first
        return (result,)

    def describe(self) -> str:
        return f"{self.kind}, pairs={len(self.pairs)}, tau={self.tau}"
