"""
Retrieved parts, assemblies and the choice of the part count.
"""

from __future__ import annotations

import json
import logging
import os
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt

from tno.shape.part_assembly.decomposer import DecompositionState
from tno.shape.part_assembly.geom import PointCloud, RigidPose, apply_pose
from tno.shape.part_assembly.partvae import PartLibrary
from tno.shape.part_assembly.retrieval.exceptions import EmptyCandidateListError

logger = logging.getLogger(__name__)

MANIFEST_SCHEMA = 1
DEFAULT_ALPHA = 1.5e-4
DEFAULT_K_SET = (2, 4, 6, 8, 10)


def _indices(values: Any) -> npt.NDArray[np.intp]:
    array = np.asarray(values, dtype=np.intp).reshape(-1).copy()
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class RetrievedPart:
    """
    A library part placed on a segment of the target.
    """

    part_id: str
    pose: RigidPose
    fit: float
    """Chamfer distance of the posed part to the cloud it was fitted to."""
    segment: npt.NDArray[np.intp] = field(default_factory=lambda: _indices([]))

    def __post_init__(self) -> None:
        if not self.fit >= 0:
            raise ValueError(f"fit must be non-negative, got {self.fit}")
        object.__setattr__(self, "segment", _indices(self.segment))

    def posed(self, library: PartLibrary) -> PointCloud:
        """
        :param library: the library the part was retrieved from
        :return: the part cloud under its pose
        """
        return apply_pose(library.get(self.part_id).points, self.pose)

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible representation
        """
        return {
            "part_id": self.part_id,
            "t": list(self.pose.translation),
            "r": self.pose.yaw,
            "fit": self.fit,
            "segment": self.segment.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RetrievedPart:
        """
        :param data: JSON-compatible representation
        :return: the part
        """
        return cls(
            data["part_id"],
            RigidPose(tuple(data["t"]), float(data["r"])),
            float(data["fit"]),
            data.get("segment", []),
        )


@dataclass(frozen=True, eq=False)
class Assembly:
    """
    The reconstruction of a target from retrieved library parts.

    The segments of the parts partition the target points. `vcd` is the
    volumetric Chamfer distance between the pooled posed parts and the target.
    """

    target_id: str
    k: int
    parts: tuple[RetrievedPart, ...]
    vcd: float
    scd: float | None = None
    output_format: str = "segment"
    seed: int = 0
    config_hash: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def part_count(self) -> int:
        """
        :return: the number of retrieved parts
        """
        return len(self.parts)

    def pooled(self, library: PartLibrary) -> PointCloud:
        """
        :param library: the library the parts were retrieved from
        :return: all posed parts in one cloud
        """
        return np.concatenate([part.posed(library) for part in self.parts])

    def labels(self, size: int) -> npt.NDArray[np.intp]:
        """
        :param size: number of target points
        :return: per target point the index of the part whose segment holds it, -1 for none
        """
        labels = np.full(size, -1, dtype=np.intp)
        for index, part in enumerate(self.parts):
            labels[part.segment] = index
        return labels

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible manifest
        """
        return {
            "schema": MANIFEST_SCHEMA,
            "target_id": self.target_id,
            "k": self.k,
            "parts": [part.to_dict() for part in self.parts],
            "metrics": {"vcd": self.vcd, "scd": self.scd},
            "format": self.output_format,
            "seed": self.seed,
            "config_hash": self.config_hash,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Assembly:
        """
        :param data: JSON-compatible manifest
        :raise ValueError: if the schema version is not supported
        :return: the assembly
        """
        if data.get("schema") != MANIFEST_SCHEMA:
            raise ValueError(f"unsupported assembly manifest schema {data.get('schema')!r}")
        return cls(
            data["target_id"],
            int(data["k"]),
            tuple(RetrievedPart.from_dict(part) for part in data["parts"]),
            float(data["metrics"]["vcd"]),
            data["metrics"].get("scd"),
            data.get("format", "segment"),
            int(data.get("seed", 0)),
            data.get("config_hash", ""),
        )

    def save(self, path: str | os.PathLike[str]) -> Path:
        """
        Write the manifest as JSON.

        :param path: destination file
        :return: the path written
        """
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | os.PathLike[str]) -> Assembly:
        """
        :param path: a manifest written by `save`
        :return: the assembly
        """
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True, eq=False)
class KCandidate:
    """
    The outcome for one part count: its reconstruction error and part count after merging.
    """

    k: int
    error: float
    part_count: int
    state: DecompositionState | None = None
    assembly: Assembly | None = None

    def penalty(self, alpha: float = DEFAULT_ALPHA) -> float:
        """
        :param alpha: price of one part
        :return: the reconstruction error plus `alpha` per part
        """
        return self.error + alpha * self.part_count


def select_k(candidates: Sequence[KCandidate], alpha: float = DEFAULT_ALPHA) -> KCandidate:
    """
    Choose the part count with the lowest penalty. Ties go to the smaller k.

    :param candidates: one candidate per part count, in any order
    :param alpha: price of one part
    :raise EmptyCandidateListError: if there are no candidates
    :return: the chosen candidate
    """
    if not candidates:
        raise EmptyCandidateListError()
    chosen = min(candidates, key=lambda candidate: (candidate.penalty(alpha), candidate.k))
    logger.info("Chose k=%d with %d parts (penalty %.6g).", chosen.k, chosen.part_count, chosen.penalty(alpha))
    return chosen
