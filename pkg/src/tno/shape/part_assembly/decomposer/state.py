"""
Optimization state of one target: latent parts, their poses and the
symmetry context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from tno.shape.part_assembly.geom import (
    PointCloud,
    RigidPose,
    SymmetryPlane,
    reflect_points,
    validate_cloud,
)
from tno.shape.part_assembly.numcore import Tensor, as_tensor


def _frozen(value: Any, shape: tuple[int, ...] | None = None) -> Tensor:
    array = as_tensor(value).copy()
    if shape is not None and array.shape != shape:
        raise ValueError(f"expected shape {shape}, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError("latent part variables must be finite")
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class LatentPart:
    """
    Continuous stand-in for a library part: a latent code and a yaw pose.

    A merged part is its own mirror image and gets no mirrored duplicate.
    """

    code: Tensor
    translation: Tensor
    yaw: float
    merged: bool = False

    def __post_init__(self) -> None:
        code = _frozen(self.code)
        if code.ndim != 1:
            raise ValueError(f"a latent code must be a vector, got shape {code.shape}")
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "translation", _frozen(self.translation, (3,)))
        if not math.isfinite(self.yaw):
            raise ValueError("latent part variables must be finite")
        object.__setattr__(self, "yaw", float(self.yaw))

    @property
    def pose(self) -> RigidPose:
        """
        :return: the pose of the part
        """
        return RigidPose(tuple(self.translation), self.yaw)


@dataclass(frozen=True, eq=False)
class DecompositionState:
    """
    The latent parts of one target together with their decoded, posed clouds.

    `decoded` lists the clouds of the free parts followed by the mirrored
    duplicates of the unmerged parts, in part order; it is consistent with the
    latent variables at every phase boundary.
    """

    target_id: str
    target: PointCloud
    parts: tuple[LatentPart, ...]
    symmetry: SymmetryPlane | None = None
    seed: int = 0
    generation: int = 0
    """Number of times the state was re-randomized."""
    history: tuple[float, ...] = ()
    decoded: tuple[PointCloud, ...] = field(default=())
    loss: float = math.inf
    recon: float = math.inf
    """Volumetric Chamfer distance between the pooled decoded parts and the target."""

    def __post_init__(self) -> None:
        target = validate_cloud(self.target, f"target {self.target_id}").copy()
        target.flags.writeable = False
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("a decomposition needs at least one part")

    @property
    def k(self) -> int:
        """
        :return: the number of free parts
        """
        return len(self.parts)

    @property
    def mirrored(self) -> tuple[int, ...]:
        """
        :return: indices of the free parts that get a mirrored duplicate
        """
        if self.symmetry is None:
            return ()
        return tuple(index for index, part in enumerate(self.parts) if not part.merged)

    @property
    def part_count(self) -> int:
        """
        :return: number of posed parts including mirrored duplicates
        """
        return self.k + len(self.mirrored)

    def codes(self) -> Tensor:
        """
        :return: the latent codes, shape (k, latent)
        """
        return np.stack([part.code for part in self.parts])

    def translations(self) -> Tensor:
        """
        :return: the translations, shape (k, 3)
        """
        return np.stack([part.translation for part in self.parts])

    def yaws(self) -> Tensor:
        """
        :return: the yaws, shape (k,)
        """
        return np.array([part.yaw for part in self.parts])

    def variables(self) -> dict[str, Tensor]:
        """
        :return: the optimization variables keyed by graph input name
        """
        return {"codes": self.codes(), "translations": self.translations(), "yaws": self.yaws()}

    def with_variables(self, variables: dict[str, Tensor]) -> DecompositionState:
        """
        Replace the latent variables, keeping merged flags. The decoded cache is cleared.

        :param variables: codes, translations and yaws
        :return: the new state
        """
        parts = tuple(
            LatentPart(code, translation, float(yaw), part.merged)
            for part, code, translation, yaw in zip(
                self.parts, variables["codes"], variables["translations"], variables["yaws"]
            )
        )
        return replace(self, parts=parts, decoded=(), loss=math.inf, recon=math.inf)

    def pooled(self) -> PointCloud:
        """
        :return: all decoded, posed clouds in one cloud
        """
        if not self.decoded:
            raise ValueError(f"state of target {self.target_id!r} has no decoded parts")
        return np.concatenate(self.decoded)

    def coverage_clouds(self) -> list[PointCloud]:
        """
        Per free part, its posed cloud together with its mirrored duplicate.

        :return: k clouds
        """
        if not self.decoded:
            raise ValueError(f"state of target {self.target_id!r} has no decoded parts")
        clouds = list(self.decoded[: self.k])
        for position, index in enumerate(self.mirrored):
            clouds[index] = np.concatenate([clouds[index], self.decoded[self.k + position]])
        return clouds

    def mirror_of(self, cloud: PointCloud) -> PointCloud:
        """
        :param cloud: a posed cloud
        :return: its reflection across the symmetry plane
        """
        if self.symmetry is None:
            raise ValueError("the state has no symmetry plane")
        return reflect_points(cloud, self.symmetry)
