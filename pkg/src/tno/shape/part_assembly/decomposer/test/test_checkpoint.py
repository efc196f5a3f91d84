"""
Tests of decomposition checkpoint files.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from tno.shape.part_assembly.decomposer import (
    CheckpointError,
    DecompositionState,
    init_state,
    load_checkpoint,
    save_checkpoint,
)
from tno.shape.part_assembly.decomposer.checkpoint import FORMAT_VERSION, MAGIC
from tno.shape.part_assembly.geom import SymmetryPlane
from tno.shape.part_assembly.partvae import PartLibrary, VaeParams


@pytest.fixture(name="state", scope="module")
def fixture_state(box_library: PartLibrary, trained_params: VaeParams) -> DecompositionState:
    """
    A symmetric state with one merged part and some history.

    :param box_library: twelve box parts
    :param trained_params: trained reduced parameters
    :return: the state
    """
    plane = SymmetryPlane((0.1, 0.0, 0.0), (0.0, 0.0, 1.0))
    state = init_state(box_library[8].points, 3, trained_params, seed=9, target_id="chair", symmetry=plane)
    parts = (replace(state.parts[0], merged=True),) + state.parts[1:]
    return replace(state, parts=parts, generation=2, history=(3.0, 2.5, 2.0))


def test_round_trip(tmp_path: Path, state: DecompositionState, trained_params: VaeParams) -> None:
    """
    A loaded checkpoint restores the state and, given the parameters, its decoded cache.

    :param tmp_path: temporary directory
    :param state: a state
    :param trained_params: trained reduced parameters
    """
    path = save_checkpoint(state, tmp_path / "chair-k3.ckpt")
    loaded = load_checkpoint(path)
    assert loaded.target_id == "chair"
    assert (loaded.seed, loaded.generation) == (9, 2)
    assert loaded.symmetry == state.symmetry
    assert [part.merged for part in loaded.parts] == [True, False, False]
    assert loaded.history == state.history
    np.testing.assert_array_equal(loaded.codes(), state.codes())
    np.testing.assert_array_equal(loaded.yaws(), state.yaws())
    np.testing.assert_array_equal(loaded.target, state.target)
    assert not loaded.decoded
    rebuilt = load_checkpoint(path, trained_params)
    assert len(rebuilt.decoded) == 3 + 2


def test_overwrite_leaves_no_temporary_files(tmp_path: Path, state: DecompositionState) -> None:
    """
    Saving twice to one path leaves a single file.

    :param tmp_path: temporary directory
    :param state: a state
    """
    save_checkpoint(state, tmp_path / "state.ckpt")
    save_checkpoint(state, tmp_path / "state.ckpt")
    assert [path.name for path in tmp_path.iterdir()] == ["state.ckpt"]


def test_bad_magic(tmp_path: Path) -> None:
    """
    A file of another kind is refused.

    :param tmp_path: temporary directory
    """
    path = tmp_path / "other.ckpt"
    path.write_bytes(b"PAVAE\x00" + bytes(16))
    with pytest.raises(CheckpointError, match="not a decomposition checkpoint"):
        load_checkpoint(path)


def test_truncated_file(tmp_path: Path, state: DecompositionState) -> None:
    """
    A truncated checkpoint is refused.

    :param tmp_path: temporary directory
    :param state: a state
    """
    path = save_checkpoint(state, tmp_path / "state.ckpt")
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(CheckpointError, match="truncated"):
        load_checkpoint(path)


def test_unknown_version(tmp_path: Path, state: DecompositionState) -> None:
    """
    A checkpoint of a newer format version is refused.

    :param tmp_path: temporary directory
    :param state: a state
    """
    path = save_checkpoint(state, tmp_path / "state.ckpt")
    data = bytearray(path.read_bytes())
    data[len(MAGIC)] = FORMAT_VERSION + 1
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointError, match="version"):
        load_checkpoint(path)


def test_missing_file(tmp_path: Path) -> None:
    """
    A missing file is reported as a checkpoint error.

    :param tmp_path: temporary directory
    """
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "absent.ckpt")
