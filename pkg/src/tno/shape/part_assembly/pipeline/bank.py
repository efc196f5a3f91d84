"""
The training bank: the chosen decomposition of every training target,
kept for amortized inference.
"""

from __future__ import annotations

import json
import logging
import os
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path
from typing import TYPE_CHECKING

from tno.shape.part_assembly.decomposer import (
    CheckpointError,
    DecompositionState,
    load_checkpoint,
    save_checkpoint,
)
from tno.shape.part_assembly.geom import PointCloud, chamfer
from tno.shape.part_assembly.partvae import VaeParams
from tno.shape.part_assembly.pipeline.exceptions import BankError

if TYPE_CHECKING:
    from tno.shape.part_assembly.pipeline.collection import TargetResult

logger = logging.getLogger(__name__)

BANK_SCHEMA = 1
BANK_INDEX = "bank.json"


class TrainingBank(Sequence[DecompositionState]):
    """
    Decomposition states of training targets, one per target id.
    """

    def __init__(self, states: Iterable[DecompositionState] = ()) -> None:
        """
        Create a bank.

        :param states: the states, in bank order
        :raise ValueError: if two states belong to the same target
        """
        self._states = list(states)
        ids = self.ids
        if len(set(ids)) != len(ids):
            raise ValueError("a training bank holds one state per target")

    @classmethod
    def from_results(cls, results: Iterable[TargetResult]) -> TrainingBank:
        """
        :param results: outcomes of a collection run
        :return: the bank of the chosen states of all successful targets
        """
        states = []
        for result in results:
            chosen = result.chosen
            if chosen is not None and chosen.state is not None:
                states.append(chosen.state)
        return cls(states)

    def __len__(self) -> int:
        return len(self._states)

    def __getitem__(self, index: int) -> DecompositionState:  # type: ignore[override]
        return self._states[index]

    def __iter__(self) -> Iterator[DecompositionState]:
        return iter(self._states)

    @property
    def ids(self) -> list[str]:
        """
        :return: the target ids in bank order
        """
        return [state.target_id for state in self._states]

    def nearest(self, target: PointCloud) -> tuple[DecompositionState, float]:
        """
        The state whose target lies closest to a cloud. Ties go to the earlier state.

        :param target: the query cloud
        :raise BankError: if the bank is empty
        :return: the state and its Chamfer distance to the query
        """
        if not self._states:
            raise BankError("The training bank is empty")
        distances = [chamfer(target, state.target) for state in self._states]
        best = min(range(len(distances)), key=distances.__getitem__)
        return self._states[best], distances[best]


def save_training_bank(bank: TrainingBank, directory: str | os.PathLike[str]) -> Path:
    """
    Write one checkpoint per state plus an index.

    :param bank: the bank
    :param directory: destination directory, created if needed
    :return: the index file
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for state in bank:
        name = f"{state.target_id}.ckpt"
        save_checkpoint(state, directory / name)
        entries.append({"target_id": state.target_id, "k": state.k, "file": name})
    path = directory / BANK_INDEX
    path.write_text(
        json.dumps({"schema": BANK_SCHEMA, "entries": entries}, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    logger.info("Wrote training bank of %d targets to %s.", len(entries), directory)
    return path


def load_training_bank(
    directory: str | os.PathLike[str], params: VaeParams | None = None, tau: float = 0.1
) -> TrainingBank:
    """
    :param directory: a directory written by `save_training_bank`
    :param params: frozen autoencoder parameters; when given, decoded caches are rebuilt
    :param tau: contact distance of the overlap penalty used to rebuild the caches
    :raise BankError: if the index or a checkpoint is missing or unreadable
    :return: the bank
    """
    directory = Path(directory)
    try:
        index = json.loads((directory / BANK_INDEX).read_text(encoding="utf-8"))
    except (OSError, ValueError) as error:
        raise BankError(f"Cannot read the training bank index in {directory}: {error}") from error
    if index.get("schema") != BANK_SCHEMA:
        raise BankError(f"Unsupported training bank schema {index.get('schema')!r}")
    states = []
    for entry in index["entries"]:
        try:
            state = load_checkpoint(directory / entry["file"], params, tau)
        except CheckpointError as error:
            raise BankError(str(error)) from error
        if state.target_id != entry["target_id"] or state.k != entry["k"]:
            raise BankError(f"Checkpoint {entry['file']} does not match its index entry")
        states.append(state)
    return TrainingBank(states)
