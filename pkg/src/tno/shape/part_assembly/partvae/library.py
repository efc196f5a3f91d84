"""
Canonical library parts and their canonicalization.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from tno.shape.part_assembly.geom import (
    PointCloud,
    RigidPose,
    apply_inverse_pose,
    validate_cloud,
    yaw_obb,
)
from tno.shape.part_assembly.numcore.utils import Tensor
from tno.shape.part_assembly.partvae.exceptions import DegeneratePartError

logger = logging.getLogger(__name__)

PART_POINTS = 512


@dataclass(frozen=True, eq=False)
class PartEntry:
    """
    A library part in its canonical frame: centered at the origin and aligned
    with its yaw-oriented bounding box.

    `pose` maps the canonical cloud back to where the part was found, and
    `surface` optionally holds surface samples in the canonical frame.
    """

    id: str
    points: PointCloud
    pose: RigidPose = field(default_factory=RigidPose)
    source: str = "unknown"
    surface: PointCloud | None = None

    def __post_init__(self) -> None:
        points = validate_cloud(self.points, f"part {self.id}").copy()
        points.flags.writeable = False
        object.__setattr__(self, "points", points)
        if self.surface is not None:
            surface = validate_cloud(self.surface, f"surface of part {self.id}").copy()
            surface.flags.writeable = False
            object.__setattr__(self, "surface", surface)


class PartLibrary(Sequence[PartEntry]):
    """
    Ordered collection of library parts with unique identifiers.
    """

    def __init__(self, entries: Iterable[PartEntry] = ()) -> None:
        """
        Create a library.

        :param entries: the parts, in retrieval order
        :raise ValueError: if two parts share an identifier or point counts differ
        """
        self._entries = list(entries)
        self._index: dict[str, int] = {}
        for position, entry in enumerate(self._entries):
            if entry.id in self._index:
                raise ValueError(f"duplicate part id {entry.id!r}")
            self._index[entry.id] = position
        if len({len(entry.points) for entry in self._entries}) > 1:
            raise ValueError("all library parts must have the same number of points")

    def __len__(self) -> int:
        return len(self._entries)

    def __getitem__(self, index: int) -> PartEntry:  # type: ignore[override]
        return self._entries[index]

    def __iter__(self) -> Iterator[PartEntry]:
        return iter(self._entries)

    @property
    def ids(self) -> list[str]:
        """
        Return the part identifiers in library order.

        :return: the identifiers
        """
        return [entry.id for entry in self._entries]

    def get(self, part_id: str) -> PartEntry:
        """
        Look a part up by identifier.

        :param part_id: the identifier
        :raise KeyError: if no such part exists
        :return: the part
        """
        return self._entries[self._index[part_id]]

    def stack(self) -> Tensor:
        """
        Stack all canonical clouds.

        :return: array of shape (parts, points, 3)
        """
        return np.stack([entry.points for entry in self._entries])

    def subset(self, ids: Iterable[str]) -> PartLibrary:
        """
        Return a library restricted to the given parts, in library order.

        :param ids: identifiers to keep
        :return: the smaller library
        """
        keep = set(ids)
        return PartLibrary(entry for entry in self._entries if entry.id in keep)


def farthest_point_sampling(points: PointCloud, count: int) -> np.ndarray:
    """
    Greedy farthest-point subsampling, starting from the first point.

    Ties are resolved towards the lowest index.

    :param points: the cloud
    :param count: number of points to select, at most the cloud size
    :return: indices of the selected points
    """
    if count > len(points):
        raise ValueError(f"cannot select {count} of {len(points)} points")
    selected = np.empty(count, dtype=np.intp)
    selected[0] = 0
    distances = np.linalg.norm(points - points[0], axis=1)
    for position in range(1, count):
        selected[position] = int(np.argmax(distances))
        distances = np.minimum(distances, np.linalg.norm(points - points[selected[position]], axis=1))
    return selected


def resample(points: PointCloud, count: int, seed: int | np.random.SeedSequence = 0) -> PointCloud:
    """
    Bring a cloud to exactly `count` points.

    Larger clouds are reduced by farthest-point sampling; smaller clouds keep
    all points and are padded by drawing points with replacement.

    :param points: the cloud
    :param count: target size
    :param seed: seed of the padding draw
    :return: the resampled cloud
    """
    points = validate_cloud(points)
    if len(points) == count:
        return points.copy()
    if len(points) > count:
        return points[farthest_point_sampling(points, count)]
    extra = np.random.default_rng(seed).integers(0, len(points), size=count - len(points))
    return np.concatenate([points, points[extra]])


def canonicalize_cloud(points: PointCloud) -> tuple[PointCloud, RigidPose]:
    """
    Center a cloud at its centroid and remove the yaw of its bounding box.

    :param points: the cloud
    :return: the canonical cloud and the pose mapping it back
    """
    centroid = points.mean(axis=0)
    _, yaw, _ = yaw_obb(points - centroid)
    pose = RigidPose(tuple(centroid), yaw)
    canonical = apply_inverse_pose(points, pose)
    return canonical - canonical.mean(axis=0), pose


def canonicalize_part(
    raw: PointCloud,
    part_id: str = "part",
    source: str = "unknown",
    n_points: int = PART_POINTS,
    seed: int | np.random.SeedSequence = 0,
    surface: PointCloud | None = None,
) -> PartEntry:
    """
    Turn a raw part cloud into a library entry.

    :param raw: the raw part cloud
    :param part_id: identifier of the part
    :param source: provenance tag
    :param n_points: number of points of the canonical cloud
    :param seed: seed of the resampling
    :param surface: optional surface samples in the raw frame, moved along into the canonical frame
    :raise DegeneratePartError: if all points coincide
    :return: the canonical entry
    """
    raw = validate_cloud(raw, f"part {part_id}")
    if float(np.ptp(raw, axis=0).max()) <= 1e-12:
        raise DegeneratePartError(part_id)
    canonical, pose = canonicalize_cloud(resample(raw, n_points, seed))
    if surface is not None:
        surface = apply_inverse_pose(validate_cloud(surface, "surface"), pose)
    logger.debug("Canonicalized part %r (yaw %.4f).", part_id, pose.yaw)
    return PartEntry(part_id, canonical, pose, source, surface)
