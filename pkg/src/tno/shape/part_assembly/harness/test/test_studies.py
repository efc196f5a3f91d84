"""
Tests of the evaluation studies on a small synthetic dataset.
"""

from __future__ import annotations

import pytest

from tno.shape.part_assembly.decomposer import ScheduleConfig
from tno.shape.part_assembly.harness import (
    EvalReport,
    SyntheticSpec,
    SyntheticTarget,
    ablation_run,
    bank_size_run,
    cluster_library,
    library_size_run,
    phase_variants,
    retrieval_budget_run,
    synthetic_dataset,
)
from tno.shape.part_assembly.harness.studies import BASELINE_ROW, OUTPUT_FORMATS, PHASE_VARIANTS
from tno.shape.part_assembly.harness.baseline import matched_budget
from tno.shape.part_assembly.partvae import PartEntry, PartLibrary, VaeParams
from tno.shape.part_assembly.pipeline import Dataset, RunConfig, scratch_steps
from tno.shape.part_assembly.retrieval import FitConfig

CONFIG = RunConfig(
    schedule=ScheduleConfig(n1=2, n2=1, n3=1),
    k_set=(1,),
    fit=FitConfig(restarts=1, steps=3),
    symmetry=False,
)

PHASE_FLAGS = [
    ("I", False, False),
    ("I+III", False, True),
    ("I+II", True, False),
    ("I+II+III", True, True),
]


@pytest.fixture(name="synthetic", scope="module")
def fixture_synthetic() -> tuple[Dataset, dict[str, SyntheticTarget]]:
    """
    Three two-part targets over four synthetic parts, the last target in the test split.

    :return: the dataset and the ground truth
    """
    spec = SyntheticSpec(size_range=(0.1, 0.25), parts_per_target=(2, 2), symmetry_prob=0.0, spread=0.4, seed=5)
    dataset, truths = synthetic_dataset(spec, 4, 3, test_frac=0.34, part_points=64, target_points=128)
    assert len(dataset.ids) == 3
    return dataset, truths


@pytest.mark.parametrize("row, phase2, phase3", PHASE_FLAGS)
def test_phase_variants(row: str, phase2: bool, phase3: bool) -> None:
    """
    Every phase combination switches part shift and borrowing accordingly.

    :param row: the row name
    :param phase2: whether part shift is enabled
    :param phase3: whether borrowing is enabled
    """
    variant = phase_variants(CONFIG)[row]
    assert variant.schedule.phase2 is phase2
    assert variant.schedule.phase3 is phase3
    assert variant.schedule.n1 == CONFIG.schedule.n1


def test_ablation(synthetic: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams) -> None:
    """
    The ablation has a row per phase combination, output format and the baseline, with a cell per target.

    :param synthetic: dataset and ground truth
    :param trained_params: trained reduced parameters
    """
    dataset, truths = synthetic
    report = ablation_run(dataset, trained_params, CONFIG, truths, bf_budget=2)
    assert report.rows == [*PHASE_VARIANTS, *OUTPUT_FORMATS, BASELINE_ROW]
    for row in report.rows:
        assert [cell.target_id for cell in report.row(row)] == dataset.ids
    for row in PHASE_VARIANTS:
        assert report.budgets[row] == scratch_steps(CONFIG.schedule)
    recon = report.row("Direct Recon")[0]
    assert recon.scd is None and recon.purity is None
    segment = report.row("Segment Retrieval")[0]
    assert segment.scd is not None and 0.0 <= segment.purity <= 1.0
    assert segment.config_hash == CONFIG.config_hash()
    assert report.budgets[BASELINE_ROW] == 2


@pytest.mark.parametrize("bf_budget", [0, -3])
def test_ablation_rejects_non_positive_budget(
    synthetic: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams, bf_budget: int
) -> None:
    """
    A brute-force budget of zero or less is an error, not a request for the matched budget.

    :param synthetic: dataset and ground truth
    :param trained_params: trained reduced parameters
    :param bf_budget: the rejected budget
    """
    dataset, _ = synthetic
    with pytest.raises(ValueError, match="bf_budget"):
        ablation_run(dataset, trained_params, CONFIG, bf_budget=bf_budget)


def test_ablation_matched_budget(
    synthetic: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams
) -> None:
    """
    Without an explicit budget the baseline gets the iteration-matched number of draws.

    :param synthetic: dataset and ground truth
    :param trained_params: trained reduced parameters
    """
    dataset, _ = synthetic
    test_split = dataset.split("test")
    report = ablation_run(test_split, trained_params, CONFIG)
    (segment,) = report.row("Segment Retrieval")
    (baseline,) = report.row(BASELINE_ROW)
    assert baseline.target_id == segment.target_id
    parts = len(test_split.library)
    assert report.budgets[BASELINE_ROW] == matched_budget(CONFIG.schedule, CONFIG.k_set, 1, parts, CONFIG.fit)


def test_ablation_without_baseline(
    synthetic: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams
) -> None:
    """
    The baseline row can be left out, and cells lack purity without ground truth.

    :param synthetic: dataset and ground truth
    :param trained_params: trained reduced parameters
    """
    dataset, _ = synthetic
    report = ablation_run(dataset.split("test"), trained_params, CONFIG, baseline=False)
    assert BASELINE_ROW not in report.rows
    assert all(cell.purity is None for cell in report.cells)


def test_retrieval_budget(synthetic: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams) -> None:
    """
    Smaller candidate fractions fit fewer candidates.

    :param synthetic: dataset and ground truth
    :param trained_params: trained reduced parameters
    """
    dataset, truths = synthetic
    report = retrieval_budget_run(dataset, trained_params, CONFIG, fractions=(0.5, 1.0), truths=truths)
    assert report.rows == ["50% candidates", "100% candidates"]
    assert report.budgets == {"50% candidates": 2, "100% candidates": 4}
    assert report.row("50% candidates")[0].config_hash != report.row("100% candidates")[0].config_hash


def test_bank_size(synthetic: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams) -> None:
    """
    Every bank size infers every test target.

    :param synthetic: dataset and ground truth
    :param trained_params: trained reduced parameters
    """
    dataset, truths = synthetic
    report = bank_size_run(dataset, trained_params, CONFIG, sizes=(1, 5), truths=truths)
    assert report.rows == ["bank 1", "bank 5"]
    for row in report.rows:
        assert [cell.target_id for cell in report.row(row)] == dataset.split("test").ids
        assert report.budgets[row] == CONFIG.short_steps


def test_bank_size_needs_both_splits(
    synthetic: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams
) -> None:
    """
    Without test targets there is nothing to infer.

    :param synthetic: dataset and ground truth
    :param trained_params: trained reduced parameters
    """
    dataset, _ = synthetic
    with pytest.raises(ValueError, match="both"):
        bank_size_run(dataset.split("train"), trained_params, CONFIG)


def test_cluster_library(box_library: PartLibrary) -> None:
    """
    Clusters partition the library, start from the first part and are capped at the library size.

    :param box_library: twelve box parts
    """
    groups = cluster_library(box_library, 3)
    assert len(groups) == 3
    assert 0 in groups[0]
    assert sorted(index for group in groups for index in group) == list(range(len(box_library)))
    assert len(cluster_library(box_library.subset(["box-00", "box-01"]), 5)) == 2
    with pytest.raises(ValueError):
        cluster_library(box_library, 0)


def test_cluster_library_with_duplicates(box_library: PartLibrary) -> None:
    """
    Identical parts never make a centre repeat, so every cluster keeps its centre.

    :param box_library: twelve box parts
    """
    copies = [PartEntry(f"dup-{index}", box_library[0].points) for index in range(3)]
    library = PartLibrary([*copies, PartEntry("other", box_library[5].points)])
    groups = cluster_library(library, 4)
    assert len(groups) == 4
    assert all(groups)
    assert sorted(index for group in groups for index in group) == [0, 1, 2, 3]
    assert groups == [[0], [3], [1], [2]]


def test_library_size(synthetic: tuple[Dataset, dict[str, SyntheticTarget]], trained_params: VaeParams) -> None:
    """
    Smaller libraries keep whole clusters and at least the requested fraction of the parts.

    :param synthetic: dataset and ground truth
    :param trained_params: trained reduced parameters
    """
    dataset, truths = synthetic
    report = library_size_run(dataset, trained_params, CONFIG, fractions=(0.5, 1.0), clusters=2, truths=truths)
    assert isinstance(report, EvalReport)
    assert report.rows == ["50% library", "100% library"]
    assert 2 <= report.budgets["50% library"] <= 4
    assert report.budgets["100% library"] == 4
