"""
Evaluation reports: one cell per target, row and seed, with means per row.
"""

from __future__ import annotations

import json
import os
from collections.abc import Iterable
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

REPORT_SCHEMA = 1


@dataclass(frozen=True)
class EvalCell:
    """
    The metrics of one target under one method, output format or setting.

    `config_hash` and `seed` identify the run whose manifest produced the cell.
    Chamfer distances are scaled by 100.
    """

    row: str
    target_id: str
    vcd: float
    scd: float | None = None
    purity: float | None = None
    seed: int = 0
    config_hash: str = ""


@dataclass
class EvalReport:
    """
    The cells of one study, in row order, plus the iteration budgets of its rows.
    """

    study: str
    cells: list[EvalCell] = field(default_factory=list)
    budgets: dict[str, int] = field(default_factory=dict)

    def add(self, cells: Iterable[EvalCell]) -> None:
        """
        :param cells: cells to append
        """
        self.cells.extend(cells)

    @property
    def rows(self) -> list[str]:
        """
        :return: the distinct rows in order of first appearance
        """
        return list(dict.fromkeys(cell.row for cell in self.cells))

    def row(self, name: str) -> list[EvalCell]:
        """
        :param name: a row
        :return: the cells of that row
        """
        return [cell for cell in self.cells if cell.row == name]

    def means(self) -> dict[str, dict[str, float | None]]:
        """
        :return: per row the mean VCD, SCD and purity over its cells, None where no cell has a value
        """
        summary: dict[str, dict[str, float | None]] = {}
        for name in self.rows:
            cells = self.row(name)
            summary[name] = {}
            for metric in ("vcd", "scd", "purity"):
                values = [getattr(cell, metric) for cell in cells if getattr(cell, metric) is not None]
                summary[name][metric] = float(np.mean(values)) if values else None
        return summary

    def table(self) -> str:
        """
        :return: the means as a plain-text table
        """
        lines = [f"{self.study}", f"{'row':<24}{'cells':>7}{'SCD':>10}{'VCD':>10}{'purity':>9}{'budget':>9}"]
        for name, summary in self.means().items():
            values = [
                f"{summary[metric]:>{width}.4f}" if summary[metric] is not None else f"{'-':>{width}}"
                for metric, width in (("scd", 10), ("vcd", 10), ("purity", 9))
            ]
            budget = str(self.budgets[name]) if name in self.budgets else "-"
            lines.append(f"{name:<24}{len(self.row(name)):>7}{''.join(values)}{budget:>9}")
        return "\n".join(lines)

    def to_dict(self) -> dict[str, Any]:
        """
        :return: JSON-compatible representation including the means
        """
        return {
            "schema": REPORT_SCHEMA,
            "study": self.study,
            "cells": [asdict(cell) for cell in self.cells],
            "budgets": dict(self.budgets),
            "means": self.means(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EvalReport:
        """
        :param data: JSON-compatible representation
        :raise ValueError: if the schema version is not supported
        :return: the report
        """
        if data.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(data["study"], [EvalCell(**cell) for cell in data["cells"]], dict(data.get("budgets", {})))

    def save(self, directory: str | os.PathLike[str]) -> tuple[Path, Path]:
        """
        Write the machine-readable metrics and the text table.

        :param directory: destination directory, created if needed
        :return: the JSON file and the text file
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        metrics = directory / f"{self.study}.json"
        metrics.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        table = directory / f"{self.study}.txt"
        table.write_text(self.table() + "\n", encoding="utf-8")
        return metrics, table
