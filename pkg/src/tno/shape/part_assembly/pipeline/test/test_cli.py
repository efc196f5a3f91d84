"""
Tests of the command-line interface.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from tno.shape.part_assembly.decomposer import ScheduleConfig
from tno.shape.part_assembly.geom import RigidPose, apply_pose
from tno.shape.part_assembly.partvae import PartLibrary, VaeParams, load_weights, save_weights
from tno.shape.part_assembly.pipeline import Dataset, RunConfig, write_raw
from tno.shape.part_assembly.pipeline.cli import build_parser, main, run_config
from tno.shape.part_assembly.retrieval import DEFAULT_K_SET, Assembly

QUICK = ["--desk", "--k-set", "1", "--n1", "2", "--n2", "1", "--n3", "1", "--no-symmetry"]


@pytest.fixture(name="workspace", scope="module")
def fixture_workspace(
    box_library: PartLibrary, trained_params: VaeParams, tmp_path_factory: pytest.TempPathFactory
) -> Path:
    """
    An ingested bundle of three targets and four parts, and a weight file.

    :param box_library: twelve box parts
    :param trained_params: trained reduced parameters
    :param tmp_path_factory: factory of temporary directories
    :return: the workspace directory
    """
    root = tmp_path_factory.mktemp("cli")
    (root / "targets").mkdir()
    (root / "parts").mkdir()
    for index in range(3):
        cloud = np.concatenate(
            [
                apply_pose(box_library[index].points, RigidPose((-0.3, 0.0, 0.0), 0.2 * index)),
                apply_pose(box_library[index + 4].points, RigidPose((0.3, 0.0, 0.0), -0.1)),
            ]
        )
        write_raw(cloud, root / "targets" / f"t{index}.pts")
    for index in range(4):
        write_raw(box_library[2 * index].points, root / "parts" / f"p{index}.pts")
    save_weights(trained_params, root / "weights.bin")
    status = main(
        [
            "-q",
            "ingest",
            "--targets",
            str(root / "targets"),
            "--parts",
            str(root / "parts"),
            "--out",
            str(root / "bundle"),
            "--part-points",
            "64",
            "--test-frac",
            "0.34",
        ]
    )
    assert status == 0
    return root


def command_args(command: str, workspace: Path, out: Path, *extra: str) -> list[str]:
    """
    :param command: the sub-command, optimize or infer
    :param workspace: the workspace directory
    :param out: output directory
    :param extra: further arguments
    :return: arguments of a quick run
    """
    bundle = str(workspace / "bundle")
    weights = str(workspace / "weights.bin")
    return ["-q", command, "--bundle", bundle, "--weights", weights, "--out", str(out), *QUICK, *extra]


def test_run_config_overrides() -> None:
    """
    Command-line options override the desk configuration.
    """
    args = build_parser().parse_args(
        [
            "optimize",
            "--bundle",
            "b",
            "--weights",
            "w",
            "--out",
            "o",
            "--desk",
            "--k-set",
            "1,3",
            "--n1",
            "5",
            "--no-phase3",
            "--candidates",
            "25%",
            "--format",
            "direct",
            "--no-symmetry",
            "--seed",
            "4",
        ]
    )
    config = run_config(args)
    assert config.k_set == (1, 3)
    assert config.schedule == ScheduleConfig.desk(n1=5, phase3=False)
    assert config.fit.candidate_frac == 0.25
    assert config.output_format == "direct"
    assert not config.symmetry
    assert config.seed == 4


def test_run_config_file(tmp_path: Path) -> None:
    """
    A configuration file is the base that options override.

    :param tmp_path: temporary directory
    """
    path = RunConfig(seed=9, alpha=1e-3).save(tmp_path / "run.json")
    args = build_parser().parse_args(["train-vae", "--bundle", "b", "--out", "w", "--config", str(path), "--seed", "2"])
    config = run_config(args)
    assert config.seed == 2
    assert config.alpha == 1e-3
    assert config.k_set == DEFAULT_K_SET


def test_invalid_part_counts() -> None:
    """
    Part counts must be integers.
    """
    with pytest.raises(SystemExit):
        build_parser().parse_args(["optimize", "--bundle", "b", "--weights", "w", "--out", "o", "--k-set", "2,x"])


def test_ingest(workspace: Path) -> None:
    """
    The ingested bundle holds all targets and parts, one target in the test split.

    :param workspace: the workspace directory
    """
    dataset = Dataset.load(workspace / "bundle")
    assert dataset.ids == ["t0", "t1", "t2"]
    assert dataset.library.ids == ["p0", "p1", "p2", "p3"]
    assert len(dataset.split("test").ids) == 1


def test_train_vae(workspace: Path, tmp_path: Path) -> None:
    """
    A short training run writes a weight file of the desk architecture.

    :param workspace: the workspace directory
    :param tmp_path: temporary directory
    """
    out = tmp_path / "weights.bin"
    bundle = str(workspace / "bundle")
    status = main(["-q", "train-vae", "--bundle", bundle, "--out", str(out), "--desk", "--epochs", "2"])
    assert status == 0
    params = load_weights(out)
    assert params.config.n_points == 64
    assert len(params.history) == 2


def test_optimize_target_is_reproducible(workspace: Path, tmp_path: Path) -> None:
    """
    Optimizing one target twice writes identical manifests, which export to colored clouds.

    :param workspace: the workspace directory
    :param tmp_path: temporary directory
    """
    manifests = []
    for run in ("first", "second"):
        assert main(command_args("optimize", workspace, tmp_path / run, "--target", "t1")) == 0
        manifests.append(tmp_path / run / "assemblies" / "t1.json")
    assert manifests[0].read_bytes() == manifests[1].read_bytes()
    assembly = Assembly.load(manifests[0])
    assert assembly.k == 1
    assert assembly.config_hash == RunConfig.load(tmp_path / "first" / "run.json").config_hash()

    status = main(
        ["-q", "export", "--bundle", str(workspace / "bundle"), "--manifest", str(manifests[0]), "--out", str(tmp_path)]
    )
    assert status == 0
    assert (tmp_path / "t1-segments.ply").is_file()
    assert (tmp_path / "t1-parts.ply").is_file()


def test_optimize_and_infer(workspace: Path, tmp_path: Path) -> None:
    """
    A collection run over the train split feeds the bank that inference on the test split starts from.

    :param workspace: the workspace directory
    :param tmp_path: temporary directory
    """
    assert main(command_args("optimize", workspace, tmp_path / "train", "--workers", "2")) == 0
    dataset = Dataset.load(workspace / "bundle")
    for target_id in dataset.split("train").ids:
        assert (tmp_path / "train" / "assemblies" / f"{target_id}.json").is_file()
    assert (tmp_path / "train" / "bank" / "bank.json").is_file()

    bank = str(tmp_path / "train" / "bank")
    status = main(command_args("infer", workspace, tmp_path / "infer", "--bank", bank))
    assert status == 0
    (test_id,) = dataset.split("test").ids
    assert Assembly.load(tmp_path / "infer" / f"{test_id}.json").target_id == test_id
