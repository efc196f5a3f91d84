"""
Tests of collection-mode optimization.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from tno.shape.part_assembly.decomposer import ScheduleConfig
from tno.shape.part_assembly.geom import RigidPose, apply_pose
from tno.shape.part_assembly.partvae import PartLibrary, VaeParams
from tno.shape.part_assembly.pipeline import (
    Dataset,
    RunConfig,
    TargetResult,
    load_training_bank,
    run_collection,
    run_collection_sync,
    target_distance_matrix,
)
from tno.shape.part_assembly.pipeline import collection
from tno.shape.part_assembly.retrieval import Assembly, FitConfig

CONFIG = RunConfig(
    schedule=ScheduleConfig(n1=3, n2=1, n3=1),
    k_set=(1, 2),
    fit=FitConfig(restarts=1, steps=3),
    symmetry=False,
)


@pytest.fixture(name="dataset", scope="module")
def fixture_dataset(box_library: PartLibrary) -> Dataset:
    """
    Three targets built from the box library; the first two are identical.

    :param box_library: twelve box parts
    :return: the dataset
    """
    pair = np.concatenate(
        [
            apply_pose(box_library[1].points, RigidPose((-0.3, 0.0, 0.0), 0.3)),
            apply_pose(box_library[7].points, RigidPose((0.3, 0.1, 0.0), -0.5)),
        ]
    )
    single = apply_pose(box_library[3].points, RigidPose((0.0, 0.0, 0.1), 1.0))
    return Dataset((("a", pair), ("b", pair.copy()), ("c", single)), box_library)


@pytest.fixture(name="run", scope="module")
def fixture_run(
    dataset: Dataset, trained_params: VaeParams, tmp_path_factory: pytest.TempPathFactory
) -> tuple[list[TargetResult], Path]:
    """
    A serial collection run that writes its outputs.

    :param dataset: three targets
    :param trained_params: trained reduced parameters
    :param tmp_path_factory: factory of temporary directories
    :return: the results and the output directory
    """
    output = tmp_path_factory.mktemp("collection")
    return run_collection_sync(dataset, trained_params, CONFIG, output), output


def test_distance_matrix(dataset: Dataset) -> None:
    """
    The distance matrix is symmetric with a zero diagonal, and identical targets are at distance zero.

    :param dataset: three targets
    """
    distances = target_distance_matrix([cloud for _, cloud in dataset.targets])
    assert distances.shape == (3, 3)
    np.testing.assert_allclose(distances, distances.T)
    np.testing.assert_array_equal(np.diag(distances), 0.0)
    assert distances[0, 1] == 0.0
    assert distances[0, 2] > 0.0


def test_distance_matrix_needs_two_targets(dataset: Dataset) -> None:
    """
    A single target has no distance matrix.

    :param dataset: three targets
    """
    with pytest.raises(ValueError, match="at least two"):
        target_distance_matrix([dataset.target("a")])


def test_results(run: tuple[list[TargetResult], Path]) -> None:
    """
    Every target gets a candidate per part count and a chosen assembly carrying the run's hash.

    :param run: results and output directory
    """
    results, _ = run
    assert [result.target_id for result in results] == ["a", "b", "c"]
    for result in results:
        assert result.ok
        assert not result.errors
        assert [candidate.k for candidate in result.candidates] == [1, 2]
        assert result.chosen is not None
        assert result.chosen.assembly is result.assembly
        assert result.assembly.target_id == result.target_id
        assert result.assembly.config_hash == CONFIG.config_hash()


def test_outputs(run: tuple[list[TargetResult], Path], trained_params: VaeParams) -> None:
    """
    The manifests and the training bank of the chosen states are written.

    :param run: results and output directory
    :param trained_params: trained reduced parameters
    """
    results, output = run
    for result in results:
        manifest = Assembly.load(output / "assemblies" / f"{result.target_id}.json")
        assert manifest.k == result.assembly.k
        assert [part.part_id for part in manifest.parts] == [part.part_id for part in result.assembly.parts]
    bank = load_training_bank(output / "bank", trained_params)
    assert bank.ids == ["a", "b", "c"]
    assert [state.k for state in bank] == [result.chosen.k for result in results]


@pytest.mark.asyncio
async def test_workers_do_not_change_results(
    dataset: Dataset, trained_params: VaeParams, run: tuple[list[TargetResult], Path], tmp_path: Path
) -> None:
    """
    Running the tasks on three workers gives the same manifests as running them one at a time.

    :param dataset: three targets
    :param trained_params: trained reduced parameters
    :param run: results and output directory of the serial run
    :param tmp_path: temporary directory
    """
    _, serial = run
    await run_collection(dataset, trained_params, replace(CONFIG, workers=3), tmp_path)
    for target_id in dataset.ids:
        name = Path("assemblies") / f"{target_id}.json"
        assert (tmp_path / name).read_bytes() == (serial / name).read_bytes()


def test_failure_is_isolated(
    dataset: Dataset, trained_params: VaeParams, monkeypatch: pytest.MonkeyPatch
) -> None:
    """
    A target that fails for one part count keeps its other part count, and the other targets are unaffected.

    :param dataset: three targets
    :param trained_params: trained reduced parameters
    :param monkeypatch: pytest monkeypatch fixture
    """
    original = collection.init_state

    def failing_init_state(target: np.ndarray, k: int, *args: Any, **kwargs: Any) -> Any:
        if kwargs.get("target_id") == "c" and k == 2:
            raise RuntimeError("simulated failure")
        return original(target, k, *args, **kwargs)

    monkeypatch.setattr(collection, "init_state", failing_init_state)
    results = run_collection_sync(dataset, trained_params, CONFIG)
    by_id = {result.target_id: result for result in results}
    assert by_id["c"].ok
    assert [candidate.k for candidate in by_id["c"].candidates] == [1]
    assert len(by_id["c"].errors) == 1
    assert "simulated failure" in by_id["c"].errors[0]
    assert all(by_id[target_id].ok and not by_id[target_id].errors for target_id in ("a", "b"))
