"""
Datasets of targets and library parts, their ingestion from files and their
storage as bundle directories.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import trimesh

from tno.shape.part_assembly.geom import (
    MeshSamplingError,
    PointCloud,
    RigidPose,
    sample_mesh_interior,
    validate_cloud,
)
from tno.shape.part_assembly.partvae import (
    PART_POINTS,
    DegeneratePartError,
    PartEntry,
    PartLibrary,
    canonicalize_part,
)
from tno.shape.part_assembly.pipeline.cloudio import RAW_SUFFIX, load_geometry, read_raw, write_raw
from tno.shape.part_assembly.pipeline.exceptions import IngestError

logger = logging.getLogger(__name__)

BUNDLE_SCHEMA = 1
INDEX_NAME = "index.json"
TARGET_POINTS = 2048
SPLITS = ("source", "train", "test")


def stream_seed(master: int, name: str) -> int:
    """
    Derive an independent seed for a named item from a master seed.

    :param master: the master seed
    :param name: the item, e.g. a target id
    :return: a 63-bit seed
    """
    digest = hashlib.sha256(f"{master}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1


@dataclass(frozen=True)
class IngestConfig:
    """
    Sampling and splitting of ingested inputs.
    """

    target_points: int = TARGET_POINTS
    part_points: int = PART_POINTS
    test_frac: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.target_points < 1 or self.part_points < 2:
            raise ValueError(f"invalid point counts {self.target_points} and {self.part_points}")
        if not 0.0 <= self.test_frac < 1.0:
            raise ValueError(f"test_frac must lie in [0, 1), got {self.test_frac}")

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible representation
        """
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> IngestConfig:
        """
        :param data: JSON-compatible representation
        :return: the configuration
        """
        return cls(**data)


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Targets and a part library sharing one normalization.

    All clouds were multiplied by `scale` after centering, so that the
    bounding-box diagonal of every target is at most one. Every target carries
    a split tag; the library is the source split.
    """

    targets: tuple[tuple[str, PointCloud], ...]
    library: PartLibrary
    scale: float = 1.0
    splits: dict[str, str] = field(default_factory=dict)
    surfaces: dict[str, PointCloud] = field(default_factory=dict)

    def __post_init__(self) -> None:
        targets = tuple((target_id, validate_cloud(cloud, f"target {target_id}")) for target_id, cloud in self.targets)
        ids = [target_id for target_id, _ in targets]
        if len(set(ids)) != len(ids):
            raise ValueError("target ids must be unique")
        splits = {target_id: self.splits.get(target_id, "train") for target_id in ids}
        unknown = set(splits.values()) - set(SPLITS)
        if unknown:
            raise ValueError(f"unknown split tags {sorted(unknown)}, expected {SPLITS}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "splits", splits)

    @property
    def ids(self) -> list[str]:
        """
        :return: the target ids in dataset order
        """
        return [target_id for target_id, _ in self.targets]

    def target(self, target_id: str) -> PointCloud:
        """
        :param target_id: a target id
        :raise KeyError: if there is no such target
        :return: the target cloud
        """
        for candidate, cloud in self.targets:
            if candidate == target_id:
                return cloud
        raise KeyError(target_id)

    def split(self, tag: str) -> Dataset:
        """
        :param tag: a split tag
        :return: the dataset restricted to the targets of that split
        """
        return self.subset(target_id for target_id in self.ids if self.splits[target_id] == tag)

    def subset(self, ids: Iterable[str]) -> Dataset:
        """
        :param ids: target ids to keep
        :return: the dataset restricted to those targets, in dataset order
        """
        keep = set(ids)
        return Dataset(
            tuple((target_id, cloud) for target_id, cloud in self.targets if target_id in keep),
            self.library,
            self.scale,
            {target_id: tag for target_id, tag in self.splits.items() if target_id in keep},
            {target_id: cloud for target_id, cloud in self.surfaces.items() if target_id in keep},
        )

    def save(self, directory: str | os.PathLike[str]) -> Path:
        """
        Write the dataset as a bundle: an index manifest plus one raw cloud file per target and part.

        :param directory: the bundle directory, created if needed
        :return: the index file
        """
        directory = Path(directory)
        for sub in ("targets", "parts", "surfaces"):
            (directory / sub).mkdir(parents=True, exist_ok=True)
        targets = []
        for target_id, cloud in self.targets:
            entry = {"id": target_id, "file": f"targets/{target_id}{RAW_SUFFIX}", "split": self.splits[target_id]}
            write_raw(cloud, directory / entry["file"])
            if target_id in self.surfaces:
                entry["surface"] = f"surfaces/{target_id}{RAW_SUFFIX}"
                write_raw(self.surfaces[target_id], directory / entry["surface"])
            targets.append(entry)
        parts = []
        for part in self.library:
            entry = {
                "id": part.id,
                "file": f"parts/{part.id}{RAW_SUFFIX}",
                "source": part.source,
                "pose": part.pose.to_dict(),
            }
            write_raw(part.points, directory / entry["file"])
            if part.surface is not None:
                entry["surface"] = f"parts/{part.id}.surface{RAW_SUFFIX}"
                write_raw(part.surface, directory / entry["surface"])
            parts.append(entry)
        index = {"schema": BUNDLE_SCHEMA, "scale": self.scale, "targets": targets, "parts": parts}
        path = directory / INDEX_NAME
        path.write_text(json.dumps(index, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info("Wrote bundle of %d targets and %d parts to %s.", len(targets), len(parts), directory)
        return path

    @classmethod
    def load(cls, directory: str | os.PathLike[str]) -> Dataset:
        """
        :param directory: a bundle written by `save`
        :raise IngestError: if the index is missing, of another schema or refers to broken files
        :return: the dataset
        """
        directory = Path(directory)
        index_path = directory / INDEX_NAME
        try:
            index = json.loads(index_path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as error:
            raise IngestError(str(index_path), str(error)) from error
        if index.get("schema") != BUNDLE_SCHEMA:
            raise IngestError(str(index_path), f"unsupported bundle schema {index.get('schema')!r}")
        targets = tuple((entry["id"], read_raw(directory / entry["file"])) for entry in index["targets"])
        surfaces = {
            entry["id"]: read_raw(directory / entry["surface"]) for entry in index["targets"] if "surface" in entry
        }
        library = PartLibrary(
            PartEntry(
                entry["id"],
                read_raw(directory / entry["file"]),
                RigidPose.from_dict(entry["pose"]),
                entry.get("source", "unknown"),
                read_raw(directory / entry["surface"]) if "surface" in entry else None,
            )
            for entry in index["parts"]
        )
        splits = {entry["id"]: entry["split"] for entry in index["targets"]}
        return cls(targets, library, float(index["scale"]), splits, surfaces)


def _read_input(path: Path, count: int, seed: int) -> PointCloud:
    geometry = load_geometry(path)
    if not isinstance(geometry, trimesh.Trimesh):
        return validate_cloud(geometry, str(path))
    if not geometry.is_watertight:
        raise IngestError(str(path), "the mesh is not watertight")
    try:
        return sample_mesh_interior(geometry, count, seed)
    except MeshSamplingError as error:
        raise IngestError(str(path), str(error)) from error


def _ids(paths: Sequence[Path]) -> list[str]:
    ids = [path.stem for path in paths]
    for path, name in zip(paths, ids):
        if ids.count(name) > 1:
            raise IngestError(str(path), f"another input has the same name {name!r}")
    return ids


def _bbox_center(points: PointCloud) -> np.ndarray:
    return (points.min(axis=0) + points.max(axis=0)) / 2


def ingest(
    target_paths: Sequence[str | os.PathLike[str]],
    part_paths: Sequence[str | os.PathLike[str]],
    config: IngestConfig | None = None,
) -> Dataset:
    """
    Build a dataset from target and part files.

    Watertight meshes are sampled in their interior; point-cloud files are
    taken as they are. Targets are centered on their bounding-box center. One
    scale factor, chosen so that the largest target bounding-box diagonal
    becomes one, is applied to targets and parts alike. Parts are then
    canonicalized into the library. A seeded `test_frac` of the targets is
    tagged as test split, the others as train split.

    :param target_paths: target files, whose stems become the target ids
    :param part_paths: part files, whose stems become the part ids
    :param config: sampling and splitting settings
    :raise IngestError: for unreadable files, non-watertight meshes, duplicate names or degenerate parts
    :return: the dataset
    """
    config = config if config is not None else IngestConfig()
    target_files = sorted(Path(path) for path in target_paths)
    part_files = sorted(Path(path) for path in part_paths)
    if not target_files:
        raise ValueError("at least one target is required")
    target_ids = _ids(target_files)
    part_ids = _ids(part_files)
    raw_targets = [
        _read_input(path, config.target_points, stream_seed(config.seed, f"target:{name}"))
        for path, name in zip(target_files, target_ids)
    ]
    raw_parts = [
        _read_input(path, config.part_points, stream_seed(config.seed, f"part:{name}"))
        for path, name in zip(part_files, part_ids)
    ]
    centered = [cloud - _bbox_center(cloud) for cloud in raw_targets]
    diagonal = max(float(np.linalg.norm(np.ptp(cloud, axis=0))) for cloud in centered)
    scale = 1.0 / diagonal if diagonal > 0 else 1.0
    targets = tuple((name, cloud * scale) for name, cloud in zip(target_ids, centered))
    entries = []
    for path, name, cloud in zip(part_files, part_ids, raw_parts):
        try:
            seed = stream_seed(config.seed, name)
            entries.append(canonicalize_part(cloud * scale, name, path.name, config.part_points, seed))
        except DegeneratePartError as error:
            raise IngestError(str(path), str(error)) from error
    order = np.random.default_rng(config.seed).permutation(len(target_ids))
    test_count = math.floor(config.test_frac * len(target_ids))
    test_ids = {target_ids[index] for index in order[:test_count]}
    splits = {name: "test" if name in test_ids else "train" for name in target_ids}
    logger.info(
        "Ingested %d targets (%d test) and %d parts at scale %.6g.", len(targets), test_count, len(entries), scale
    )
    return Dataset(targets, PartLibrary(entries), scale, splits)
