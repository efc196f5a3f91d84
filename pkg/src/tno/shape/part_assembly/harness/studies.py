"""
Evaluation studies: the phase ablation with the output formats and the
brute-force baseline, the number of retrieval candidates, the size of the
training bank and the size of the part library.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import replace

import numpy as np

from tno.shape.part_assembly.geom import chamfer
from tno.shape.part_assembly.harness.baseline import bf_baseline, matched_budget
from tno.shape.part_assembly.harness.metrics import CD_SCALE, metrics, segment_purity
from tno.shape.part_assembly.harness.report import EvalCell, EvalReport
from tno.shape.part_assembly.harness.synthetic import SyntheticTarget
from tno.shape.part_assembly.partvae import PartLibrary, VaeParams
from tno.shape.part_assembly.pipeline import (
    Dataset,
    RunConfig,
    TargetResult,
    TrainingBank,
    amortized_infer,
    run_collection_sync,
    scratch_steps,
    stream_seed,
)
from tno.shape.part_assembly.retrieval import Assembly, direct_recon_error, encode_library, retrieve_state

logger = logging.getLogger(__name__)

PHASE_VARIANTS = ("I", "I+III", "I+II", "I+II+III")
OUTPUT_FORMATS = ("Direct Recon", "Direct Retrieval", "Segment Retrieval")
BASELINE_ROW = "BF Segment Retrieval"


def _cell(
    row: str,
    assembly: Assembly,
    dataset: Dataset,
    truths: Mapping[str, SyntheticTarget] | None,
    config_hash: str,
    seed: int,
) -> EvalCell:
    target = dataset.target(assembly.target_id)
    scd, vcd = metrics(assembly, dataset.library, target, dataset.surfaces.get(assembly.target_id))
    purity = None
    if truths is not None and assembly.target_id in truths:
        purity = segment_purity(assembly, truths[assembly.target_id].truth, target, dataset.library)
    return EvalCell(row, assembly.target_id, vcd, scd, purity, seed, config_hash)


def _result_cells(
    row: str,
    results: Sequence[TargetResult],
    dataset: Dataset,
    truths: Mapping[str, SyntheticTarget] | None,
    config: RunConfig,
) -> list[EvalCell]:
    cells = []
    for result in results:
        if result.assembly is None or not result.assembly.parts:
            logger.warning("No assembly for %s in row %s.", result.target_id, row)
            continue
        cells.append(_cell(row, result.assembly, dataset, truths, config.config_hash(), config.seed))
    return cells


def phase_variants(config: RunConfig) -> dict[str, RunConfig]:
    """
    :param config: the full run configuration
    :return: the configuration of every phase combination, by row name
    """
    schedule = config.schedule
    return {
        "I": replace(config, schedule=schedule.phase_one_only()),
        "I+III": replace(config, schedule=replace(schedule, phase2=False, phase3=True)),
        "I+II": replace(config, schedule=replace(schedule, phase2=True, phase3=False)),
        "I+II+III": replace(config, schedule=replace(schedule, phase2=True, phase3=True)),
    }


def ablation_run(
    dataset: Dataset,
    params: VaeParams,
    config: RunConfig | None = None,
    truths: Mapping[str, SyntheticTarget] | None = None,
    seeds: Sequence[int] = (0,),
    baseline: bool = True,
    bf_budget: int | None = None,
) -> EvalReport:
    """
    Evaluate every combination of the phases, the output formats and the brute-force baseline.

    All phase combinations share the seeds. The output formats are evaluated
    on the states of the full method: the decoded parts themselves, parts
    retrieved for the decoded parts and parts retrieved for the target
    segments. The baseline draws as many parts as the full method retrieved
    and gets an iteration-matched budget unless `bf_budget` is given. The
    largest number of draws is recorded as the budget of the baseline row.

    :param dataset: targets and library
    :param params: frozen autoencoder parameters
    :param config: the full run configuration
    :param truths: ground truth per target id, for segment purity
    :param seeds: master seeds shared by all rows
    :param baseline: whether to evaluate the brute-force baseline
    :param bf_budget: number of brute-force draws per target
    :raise ValueError: if `bf_budget` is given and not positive
    :return: the report with one row per phase combination, output format and baseline
    """
    if bf_budget is not None and bf_budget < 1:
        raise ValueError(f"bf_budget must be positive, got {bf_budget}")
    config = config if config is not None else RunConfig()
    report = EvalReport("ablation")
    for seed in seeds:
        full: list[TargetResult] = []
        full_config = config
        for name, variant in phase_variants(replace(config, seed=seed)).items():
            logger.info("Ablation row %s, seed %d.", name, seed)
            results = run_collection_sync(dataset, params, variant)
            report.add(_result_cells(name, results, dataset, truths, variant))
            report.budgets[name] = scratch_steps(variant.schedule, len(variant.k_set))
            if name == "I+II+III":
                full, full_config = results, variant
        report.add(_format_cells(full, dataset, params, full_config, truths))
        if baseline:
            cells, budget = _baseline_cells(full, dataset, full_config, truths, bf_budget)
            report.add(cells)
            report.budgets[BASELINE_ROW] = max(report.budgets.get(BASELINE_ROW, 0), budget)
    return report


def _format_cells(
    results: Sequence[TargetResult],
    dataset: Dataset,
    params: VaeParams,
    config: RunConfig,
    truths: Mapping[str, SyntheticTarget] | None,
) -> list[EvalCell]:
    config_hash = config.config_hash()
    cells = []
    for result in results:
        chosen = result.chosen
        if chosen is None or chosen.state is None or result.assembly is None:
            continue
        state = chosen.state
        recon = CD_SCALE * direct_recon_error(state)
        cells.append(EvalCell("Direct Recon", result.target_id, recon, None, None, config.seed, config_hash))
        direct = retrieve_state(
            state,
            dataset.library,
            params,
            config.fit,
            config.schedule,
            output_format="direct",
            seed=stream_seed(config.seed, result.target_id),
            config_hash=config_hash,
        )
        if direct.parts:
            cells.append(_cell("Direct Retrieval", direct, dataset, truths, config_hash, config.seed))
        cells.append(_cell("Segment Retrieval", result.assembly, dataset, truths, config_hash, config.seed))
    return cells


def _baseline_cells(
    results: Sequence[TargetResult],
    dataset: Dataset,
    config: RunConfig,
    truths: Mapping[str, SyntheticTarget] | None,
    bf_budget: int | None,
) -> tuple[list[EvalCell], int]:
    cells = []
    largest = 0
    for result in results:
        if result.assembly is None or not result.assembly.parts:
            continue
        k = result.assembly.part_count
        budget = (
            bf_budget
            if bf_budget is not None
            else matched_budget(config.schedule, config.k_set, k, len(dataset.library), config.fit)
        )
        seed = stream_seed(config.seed, result.target_id)
        assembly = bf_baseline(
            dataset.target(result.target_id), dataset.library, k, budget, seed, config.fit, result.target_id
        )
        cells.append(_cell(BASELINE_ROW, assembly, dataset, truths, config.config_hash(), config.seed))
        largest = max(largest, budget)
    return cells, largest


def retrieval_budget_run(
    dataset: Dataset,
    params: VaeParams,
    config: RunConfig | None = None,
    fractions: Sequence[float] = (0.05, 0.25, 1.0),
    truths: Mapping[str, SyntheticTarget] | None = None,
) -> EvalReport:
    """
    Evaluate segment retrieval with candidate sets of different sizes.

    The targets are decomposed once; the chosen states are then retrieved
    again with the nearest `fraction` of the library, preselected in the
    latent space, as candidates.

    :param dataset: targets and library
    :param params: frozen autoencoder parameters
    :param config: the run configuration
    :param fractions: candidate fractions in (0, 1]
    :param truths: ground truth per target id, for segment purity
    :return: the report with one row per fraction
    """
    config = config if config is not None else RunConfig()
    report = EvalReport("retrieval_budget")
    results = run_collection_sync(dataset, params, config)
    codes = encode_library(dataset.library, params)
    for fraction in fractions:
        fit = replace(config.fit, candidate_frac=fraction)
        variant = replace(config, fit=fit)
        row = f"{fraction:.0%} candidates"
        for result in results:
            chosen = result.chosen
            if chosen is None or chosen.state is None:
                continue
            assembly = retrieve_state(
                chosen.state,
                dataset.library,
                params,
                fit,
                config.schedule,
                codes,
                "segment",
                stream_seed(config.seed, result.target_id),
                variant.config_hash(),
            )
            if assembly.parts:
                report.add([_cell(row, assembly, dataset, truths, variant.config_hash(), config.seed)])
        report.budgets[row] = fit.candidate_count(len(dataset.library))
    return report


def bank_size_run(
    dataset: Dataset,
    params: VaeParams,
    config: RunConfig | None = None,
    sizes: Sequence[int] = (1, 5, 10, 20),
    truths: Mapping[str, SyntheticTarget] | None = None,
) -> EvalReport:
    """
    Evaluate amortized inference on the test split with training banks of different sizes.

    The train split is decomposed once; each bank keeps its first `size` states.

    :param dataset: targets with train and test splits, and the library
    :param params: frozen autoencoder parameters
    :param config: the run configuration
    :param sizes: bank sizes
    :param truths: ground truth per target id, for segment purity
    :raise ValueError: if one of the splits is empty
    :return: the report with one row per bank size
    """
    config = config if config is not None else RunConfig()
    train, test = dataset.split("train"), dataset.split("test")
    if not train.targets or not test.targets:
        raise ValueError("the bank size study needs targets in both the train and the test split")
    report = EvalReport("bank_size")
    bank = TrainingBank.from_results(run_collection_sync(train, params, config))
    for size in sizes:
        row = f"bank {size}"
        subset = TrainingBank(list(bank)[:size])
        for target_id, cloud in test.targets:
            inferred = amortized_infer(cloud, subset, dataset.library, params, config, target_id)
            if inferred.assembly.parts:
                report.add([_cell(row, inferred.assembly, dataset, truths, config.config_hash(), config.seed)])
        report.budgets[row] = config.short_steps
    return report


def cluster_library(library: PartLibrary, clusters: int) -> list[list[int]]:
    """
    Group library parts around farthest-first centres.

    The first part is the first centre; every further centre is the part not
    yet chosen that is farthest, in Chamfer distance, from all earlier centres.
    Every centre forms its own cluster; every other part joins its closest
    centre, ties to the earlier centre.

    :param library: the non-empty library
    :param clusters: number of centres, capped at the library size
    :raise ValueError: if the library is empty or `clusters` is not positive
    :return: the part indices per cluster, in centre order
    """
    if not len(library) or clusters < 1:
        raise ValueError(f"need a non-empty library and at least one cluster, got {len(library)} and {clusters}")
    size = len(library)
    distances = np.zeros((size, size))
    for row in range(size):
        for column in range(row + 1, size):
            distances[row, column] = distances[column, row] = chamfer(library[row].points, library[column].points)
    centres = [0]
    for _ in range(min(clusters, size) - 1):
        spread = distances[centres].min(axis=0)
        spread[centres] = -np.inf
        centres.append(int(np.argmax(spread)))
    assignment = np.argmin(distances[centres], axis=0)
    assignment[centres] = np.arange(len(centres))
    return [[int(index) for index in np.flatnonzero(assignment == position)] for position in range(len(centres))]


def library_size_run(
    dataset: Dataset,
    params: VaeParams,
    config: RunConfig | None = None,
    fractions: Sequence[float] = (0.25, 0.5, 1.0),
    clusters: int = 8,
    truths: Mapping[str, SyntheticTarget] | None = None,
) -> EvalReport:
    """
    Evaluate the method with smaller libraries made of whole clusters of similar parts.

    For every fraction, clusters are kept in centre order until they hold at
    least that fraction of the parts.

    :param dataset: targets and library
    :param params: frozen autoencoder parameters
    :param config: the run configuration
    :param fractions: library fractions in (0, 1]
    :param clusters: number of clusters
    :param truths: ground truth per target id, for segment purity
    :return: the report with one row per fraction
    """
    config = config if config is not None else RunConfig()
    report = EvalReport("library_size")
    groups = cluster_library(dataset.library, clusters)
    for fraction in fractions:
        needed = math.ceil(fraction * len(dataset.library) - 1e-9)
        kept: list[int] = []
        for group in groups:
            if len(kept) >= needed:
                break
            kept.extend(group)
        library = dataset.library.subset(dataset.library[index].id for index in kept)
        reduced = Dataset(dataset.targets, library, dataset.scale, dataset.splits, dataset.surfaces)
        row = f"{fraction:.0%} library"
        results = run_collection_sync(reduced, params, config)
        report.add(_result_cells(row, results, reduced, truths, config))
        report.budgets[row] = len(library)
    return report
