"""
Measured behaviour of the full method on small synthetic suites: the baseline
comparison, the ordering of the phase combinations, the part count of
symmetric targets and the detection of their mirror planes.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from tno.shape.part_assembly.decomposer import DETECT, ScheduleConfig
from tno.shape.part_assembly.geom import detect_symmetry_plane
from tno.shape.part_assembly.harness import EvalReport, SyntheticSpec, SyntheticTarget, ablation_run, synthetic_dataset
from tno.shape.part_assembly.harness.studies import BASELINE_ROW
from tno.shape.part_assembly.partvae import VaeParams
from tno.shape.part_assembly.pipeline import Dataset, RunConfig
from tno.shape.part_assembly.retrieval import FitConfig, assemble

SUITE_CONFIG = RunConfig(
    schedule=ScheduleConfig(n1=8, n2=2, n3=1),
    k_set=(2,),
    fit=FitConfig(restarts=4, steps=30),
    symmetry=False,
)

SYMMETRIC_SPEC = SyntheticSpec(
    size_range=(0.1, 0.25), parts_per_target=(2, 2), symmetry_prob=1.0, spread=0.3, gap=0.08, seed=9
)


@pytest.fixture(name="suite", scope="module")
def fixture_suite() -> tuple[Dataset, dict[str, SyntheticTarget]]:
    """
    Six targets of two parts each, spread apart, over a library of four parts.

    :return: the dataset and the ground truth
    """
    spec = SyntheticSpec(size_range=(0.1, 0.25), parts_per_target=(2, 2), symmetry_prob=0.0, spread=0.4, seed=21)
    return synthetic_dataset(spec, 4, 6, part_points=64, target_points=128)


@pytest.fixture(name="ablation", scope="module")
def fixture_ablation(suite: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams) -> EvalReport:
    """
    The ablation of the suite with the iteration-matched baseline.

    :param suite: dataset and ground truth
    :param trained_params: trained reduced parameters
    :return: the report
    """
    dataset, truths = suite
    return ablation_run(dataset, trained_params, SUITE_CONFIG, truths)


@pytest.fixture(name="symmetric", scope="module")
def fixture_symmetric() -> tuple[Dataset, dict[str, SyntheticTarget]]:
    """
    Ten targets made of one part and its mirror image across x = 0.

    :return: the dataset and the ground truth
    """
    return synthetic_dataset(SYMMETRIC_SPEC, 6, 10, part_points=64, target_points=128)


def test_full_method_beats_baseline(ablation: EvalReport) -> None:
    """
    Segment retrieval after all phases reconstructs at least 80% of the targets
    better than the brute-force baseline with the same iteration budget.

    :param ablation: the ablation report of the suite
    """
    method = {cell.target_id: cell.vcd for cell in ablation.row("Segment Retrieval")}
    baseline = {cell.target_id: cell.vcd for cell in ablation.row(BASELINE_ROW)}
    assert method.keys() == baseline.keys()
    wins = sum(method[target_id] < baseline[target_id] for target_id in method)
    assert wins >= math.ceil(0.8 * len(method))


def test_phases_do_not_hurt(ablation: EvalReport) -> None:
    """
    Adding part shift and then borrowing does not raise the mean VCD by more than 5%.

    :param ablation: the ablation report of the suite
    """
    means = ablation.means()
    phase_one, with_shift, full = (means[row]["vcd"] for row in ("I", "I+II", "I+II+III"))
    assert phase_one is not None and with_shift is not None and full is not None
    assert with_shift <= 1.05 * phase_one
    assert full <= 1.05 * with_shift


def test_mirror_planes_of_symmetric_targets(symmetric: tuple[Dataset, dict[str, SyntheticTarget]]) -> None:
    """
    The detected plane of every generated symmetric target lies within 3 degrees of its true plane.

    :param symmetric: dataset and ground truth
    """
    _, truths = symmetric
    assert len(truths) >= 8
    for truth in truths.values():
        assert truth.plane is not None
        plane = detect_symmetry_plane(truth.cloud)
        assert plane is not None
        cosine = abs(float(np.dot(plane.normal, truth.plane.normal)))
        assert cosine >= math.cos(math.radians(3.0))


def test_symmetric_pair_is_assembled_from_two_parts(
    symmetric: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams
) -> None:
    """
    A target of one part and its mirror image is assembled from two parts for at least 80% of the targets.

    :param symmetric: dataset and ground truth
    :param trained_params: trained reduced parameters
    """
    dataset, _ = symmetric
    counts = []
    for seed, (target_id, cloud) in enumerate(dataset.targets):
        chosen, _ = assemble(
            cloud,
            dataset.library,
            trained_params,
            ScheduleConfig(n1=8, n2=2, n3=1),
            k_set=(1, 2),
            config=FitConfig(restarts=4, steps=30),
            seed=seed,
            target_id=target_id,
            symmetry=DETECT,
        )
        counts.append(chosen.part_count)
    assert sum(count == 2 for count in counts) >= math.ceil(0.8 * len(counts))
