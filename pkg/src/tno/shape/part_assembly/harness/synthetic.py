"""
Synthetic part libraries and targets with known decompositions.

Parts are drawn from four parametric families: boxes, cylinders, L-brackets
and tapered prisms. Targets are unions of posed library parts that keep a
minimum gap to each other, optionally completed by their mirror images.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
import trimesh

from tno.shape.part_assembly.geom import (
    PointCloud,
    RigidPose,
    SymmetryPlane,
    apply_pose,
    chamfer,
    reflect_points,
    sample_mesh_interior,
)
from tno.shape.part_assembly.numcore import nearest
from tno.shape.part_assembly.partvae import PART_POINTS, PartEntry, PartLibrary, canonicalize_part
from tno.shape.part_assembly.pipeline import TARGET_POINTS, Dataset
from tno.shape.part_assembly.retrieval import Assembly, RetrievedPart

logger = logging.getLogger(__name__)

FAMILIES = ("box", "cylinder", "l_bracket", "tapered_prism")
MIRROR = SymmetryPlane((0.0, 0.0, 0.0), (1.0, 0.0, 0.0))


@dataclass(frozen=True)
class SyntheticSpec:
    """
    Distribution of synthetic parts and targets.

    Part dimensions are drawn uniformly from `size_range`. A target holds
    between `parts_per_target[0]` and `parts_per_target[1]` parts; with
    probability `symmetry_prob` half of them are mirror images of the other
    half across the plane x = 0.
    """

    families: tuple[str, ...] = FAMILIES
    size_range: tuple[float, float] = (0.1, 0.4)
    parts_per_target: tuple[int, int] = (2, 4)
    symmetry_prob: float = 0.3
    spread: float = 0.25
    gap: float = 0.03
    max_retries: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "families", tuple(self.families))
        unknown = set(self.families) - set(FAMILIES)
        if not self.families or unknown:
            raise ValueError(f"families must be a non-empty subset of {FAMILIES}, got {self.families}")
        low, high = self.size_range
        if not 0 < low <= high:
            raise ValueError(f"size_range must be positive and ordered, got {self.size_range}")
        fewest, most = self.parts_per_target
        if not 1 <= fewest <= most:
            raise ValueError(f"parts_per_target must be positive and ordered, got {self.parts_per_target}")
        if not 0.0 <= self.symmetry_prob <= 1.0:
            raise ValueError(f"symmetry_prob must lie in [0, 1], got {self.symmetry_prob}")
        if self.spread <= 0 or self.gap <= 0 or self.max_retries < 1:
            raise ValueError(f"invalid placement settings: {self.spread}, {self.gap}, {self.max_retries}")


@dataclass(frozen=True, eq=False)
class SyntheticTarget:
    """
    A generated target with its ground-truth assembly.

    `labels` holds, per target point, the index of the ground-truth part it
    was sampled from.
    """

    target_id: str
    cloud: PointCloud
    truth: Assembly
    labels: npt.NDArray[np.intp]
    surface: PointCloud | None = None
    plane: SymmetryPlane | None = None
    part_clouds: tuple[PointCloud, ...] = field(default=())


def _components(family: str, rng: np.random.Generator, low: float, high: float) -> list[trimesh.Trimesh]:
    if family == "box":
        return [trimesh.creation.box(extents=rng.uniform(low, high, size=3))]
    if family == "cylinder":
        radius = rng.uniform(low, high) / 2
        cylinder = trimesh.creation.cylinder(radius=radius, height=rng.uniform(low, high), sections=32)
        if rng.random() < 0.5:
            cylinder.apply_transform(trimesh.transformations.rotation_matrix(math.pi / 2, [1.0, 0.0, 0.0]))
        return [cylinder]
    if family == "l_bracket":
        width, height, depth = rng.uniform(low, high, size=3)
        thickness = rng.uniform(0.25, 0.4) * min(width, height)
        foot = trimesh.creation.box(extents=(width, thickness, depth))
        foot.apply_translation((0.0, thickness / 2, 0.0))
        leg = trimesh.creation.box(extents=(thickness, height - thickness, depth))
        leg.apply_translation(((thickness - width) / 2, thickness + (height - thickness) / 2, 0.0))
        return [foot, leg]
    if family == "tapered_prism":
        width, height, depth = rng.uniform(low, high, size=3)
        taper = rng.uniform(0.3, 0.8)
        corners = np.array([[sx, 0.0, sz] for sx in (-0.5, 0.5) for sz in (-0.5, 0.5)])
        bottom = corners * (width, 1.0, depth) - (0.0, height / 2, 0.0)
        top = corners * (taper * width, 1.0, taper * depth) + (0.0, height / 2, 0.0)
        return [trimesh.convex.convex_hull(np.concatenate([bottom, top]))]
    raise ValueError(f"unknown part family {family!r}")


def _sample_union(
    meshes: Sequence[trimesh.Trimesh], count: int, surface_count: int, rng: np.random.Generator
) -> tuple[PointCloud, PointCloud]:
    volumes = np.array([mesh.volume for mesh in meshes])
    counts = rng.multinomial(count, volumes / volumes.sum())
    interior = np.concatenate(
        [
            sample_mesh_interior(mesh, int(n), np.random.SeedSequence(int(rng.integers(2**62))))
            for mesh, n in zip(meshes, counts)
            if n > 0
        ]
    )
    surface, _ = trimesh.sample.sample_surface(
        trimesh.util.concatenate(list(meshes)), surface_count, seed=int(rng.integers(2**31))
    )
    return interior, np.asarray(surface, dtype=np.float64)


def gen_library(
    spec: SyntheticSpec,
    n_parts: int,
    seed: int | None = None,
    n_points: int = PART_POINTS,
    surface_points: int = PART_POINTS,
) -> PartLibrary:
    """
    Generate canonical parametric parts.

    Families are used in turn; dimensions and sampling are seeded. A part
    identical to an earlier one is drawn again.

    :param spec: the part distribution
    :param n_parts: number of parts
    :param seed: seed of the generation, defaults to the seed of `spec`
    :param n_points: points per canonical part
    :param surface_points: surface samples per part
    :raise ValueError: if `n_parts` is not positive
    :return: the library with ids `part-0000`, `part-0001`, ...
    """
    if n_parts < 1:
        raise ValueError(f"n_parts must be at least 1, got {n_parts}")
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed if seed is None else seed, 0]))
    low, high = spec.size_range
    entries: list[PartEntry] = []
    while len(entries) < n_parts:
        family = spec.families[len(entries) % len(spec.families)]
        interior, surface = _sample_union(_components(family, rng, low, high), n_points, surface_points, rng)
        entry = canonicalize_part(
            interior, f"part-{len(entries):04d}", family, n_points, int(rng.integers(2**31)), surface
        )
        if any(chamfer(entry.points, other.points) == 0.0 for other in entries):
            logger.debug("Redrawing a duplicate %s part.", family)
            continue
        entries.append(entry)
    logger.info("Generated %d synthetic parts.", n_parts)
    return PartLibrary(entries)


def _mirror_pose(entry: PartEntry, pose: RigidPose, mirrored: PointCloud) -> RigidPose:
    flipped = (-pose.translation[0], pose.translation[1], pose.translation[2])
    options = [RigidPose(flipped, math.pi - pose.yaw), RigidPose(flipped, -pose.yaw)]
    return min(options, key=lambda option: chamfer(apply_pose(entry.points, option), mirrored))


def _place(
    spec: SyntheticSpec,
    library: PartLibrary,
    count: int,
    symmetric: bool,
    rng: np.random.Generator,
) -> list[tuple[str, RigidPose, PointCloud]] | None:
    placed: list[tuple[str, RigidPose, PointCloud]] = []
    free = max(1, count // 2) if symmetric else count
    for _ in range(free):
        for _ in range(spec.max_retries):
            entry = library[int(rng.integers(len(library)))]
            pose = RigidPose(tuple(rng.uniform(-spec.spread, spec.spread, size=3)), rng.uniform(0, 2 * math.pi))
            cloud = apply_pose(entry.points, pose)
            if symmetric:
                shift = spec.gap - cloud[:, 0].min() + rng.uniform(0, spec.spread)
                pose = RigidPose((pose.translation[0] + shift, *pose.translation[1:]), pose.yaw)
                cloud = apply_pose(entry.points, pose)
            candidates = [(entry.id, pose, cloud)]
            if symmetric:
                mirrored = reflect_points(cloud, MIRROR)
                candidates.append((entry.id, _mirror_pose(entry, pose, mirrored), mirrored))
            others = [existing for _, _, existing in placed]
            if all(
                float(nearest(candidate, other)[0].min()) > spec.gap
                for _, _, candidate in candidates
                for other in others
            ):
                placed.extend(candidates)
                break
        else:
            return None
    return placed


def gen_targets(
    spec: SyntheticSpec,
    library: PartLibrary,
    n_targets: int,
    seed: int | None = None,
    n_points: int = TARGET_POINTS,
) -> list[SyntheticTarget]:
    """
    Generate targets as unions of posed library parts.

    Every target is centered on its bounding-box center. Its cloud is drawn
    from the union of the posed part clouds: a random subset when the union
    is larger than `n_points`, the whole union padded by repeated points
    otherwise. A target whose parts cannot be placed within `max_retries`
    attempts per part is skipped with a warning.

    :param spec: the target distribution
    :param library: the non-empty part library
    :param n_targets: number of targets to attempt
    :param seed: seed of the generation, defaults to the seed of `spec`
    :param n_points: points per target
    :raise ValueError: if the library is empty
    :return: the generated targets, with ids `target-0000`, ...
    """
    if not len(library):
        raise ValueError("targets need a non-empty part library")
    base = spec.seed if seed is None else seed
    targets = []
    for index in range(n_targets):
        target_id = f"target-{index:04d}"
        rng = np.random.default_rng(np.random.SeedSequence([base, 1, index]))
        count = int(rng.integers(spec.parts_per_target[0], spec.parts_per_target[1] + 1))
        symmetric = count >= 2 and rng.random() < spec.symmetry_prob
        placed = _place(spec, library, count, symmetric, rng)
        if placed is None:
            logger.warning("Could not place the parts of %s; skipping it.", target_id)
            continue
        union = np.concatenate([cloud for _, _, cloud in placed])
        owner = np.repeat(np.arange(len(placed)), [len(posed) for _, _, posed in placed])
        center = (union.min(axis=0) + union.max(axis=0)) / 2
        if len(union) >= n_points:
            chosen = np.sort(rng.choice(len(union), size=n_points, replace=False))
        else:
            chosen = np.concatenate([np.arange(len(union)), rng.integers(0, len(union), size=n_points - len(union))])
        cloud = union[chosen] - center
        labels = owner[chosen]
        parts = []
        clouds = []
        for position, (part_id, pose, posed) in enumerate(placed):
            shifted = RigidPose(tuple(pose.t - center), pose.yaw)
            fit = chamfer(apply_pose(library.get(part_id).points, shifted), posed - center)
            parts.append(RetrievedPart(part_id, shifted, fit, np.flatnonzero(labels == position)))
            clouds.append(posed - center)
        surfaces = []
        for (part_id, _, _), part in zip(placed, parts):
            surface = library.get(part_id).surface
            if surface is None:
                break
            surfaces.append(apply_pose(surface, part.pose))
        truth_cloud = np.concatenate([apply_pose(library.get(part.part_id).points, part.pose) for part in parts])
        truth = Assembly(target_id, len(parts), tuple(parts), chamfer(truth_cloud, cloud), seed=base)
        plane = SymmetryPlane((-center[0], 0.0, 0.0), (1.0, 0.0, 0.0)) if symmetric else None
        surface_cloud = np.concatenate(surfaces) if len(surfaces) == len(parts) else None
        targets.append(SyntheticTarget(target_id, cloud, truth, labels, surface_cloud, plane, tuple(clouds)))
    logger.info("Generated %d of %d synthetic targets.", len(targets), n_targets)
    return targets


def synthetic_dataset(
    spec: SyntheticSpec,
    n_parts: int,
    n_targets: int,
    seed: int | None = None,
    test_frac: float = 0.0,
    part_points: int = PART_POINTS,
    target_points: int = TARGET_POINTS,
) -> tuple[Dataset, dict[str, SyntheticTarget]]:
    """
    Generate a library and targets and wrap them in a dataset.

    The last `test_frac` of the targets form the test split.

    :param spec: the part and target distribution
    :param n_parts: number of library parts
    :param n_targets: number of targets to attempt
    :param seed: seed of the generation, defaults to the seed of `spec`
    :param test_frac: fraction of targets in the test split
    :param part_points: points per canonical part
    :param target_points: points per target
    :return: the dataset and the generated targets by id
    """
    library = gen_library(spec, n_parts, seed, part_points, part_points)
    targets = gen_targets(spec, library, n_targets, seed, target_points)
    test_count = math.floor(test_frac * len(targets))
    splits = {
        target.target_id: "test" if position >= len(targets) - test_count else "train"
        for position, target in enumerate(targets)
    }
    dataset = Dataset(
        tuple((target.target_id, target.cloud) for target in targets),
        library,
        1.0,
        splits,
        {target.target_id: target.surface for target in targets if target.surface is not None},
    )
    return dataset, {target.target_id: target for target in targets}
