"""
Tests of evaluation reports.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from tno.shape.part_assembly.harness import EvalCell, EvalReport


@pytest.fixture(name="report")
def fixture_report() -> EvalReport:
    """
    Two rows of two targets; the first row has no surface distance.

    :return: the report
    """
    report = EvalReport("demo", budgets={"I": 120})
    report.add(
        [
            EvalCell("I", "a", vcd=2.0),
            EvalCell("I", "b", vcd=4.0),
            EvalCell("I+II", "a", vcd=1.0, scd=3.0, purity=0.5),
            EvalCell("I+II", "b", vcd=2.0, scd=5.0, purity=1.0),
        ]
    )
    return report


def test_means(report: EvalReport) -> None:
    """
    Means are taken per row over the cells that have a value.

    :param report: two-row report
    """
    assert report.rows == ["I", "I+II"]
    assert [cell.target_id for cell in report.row("I+II")] == ["a", "b"]
    assert report.means() == {
        "I": {"vcd": 3.0, "scd": None, "purity": None},
        "I+II": {"vcd": 1.5, "scd": 4.0, "purity": 0.75},
    }


def test_table(report: EvalReport) -> None:
    """
    The table has a header and one line per row, with dashes for missing values.

    :param report: two-row report
    """
    lines = report.table().splitlines()
    assert lines[0] == "demo"
    assert len(lines) == 4
    assert lines[2].startswith("I ")
    assert "3.0000" in lines[2] and "120" in lines[2] and "-" in lines[2]
    assert "4.0000" in lines[3] and "0.7500" in lines[3]


def test_save(report: EvalReport, tmp_path: Path) -> None:
    """
    The report is written as JSON and as a text table, and reads back.

    :param report: two-row report
    :param tmp_path: temporary directory
    """
    metrics, table = report.save(tmp_path)
    assert metrics.name == "demo.json"
    assert table.read_text(encoding="utf-8") == report.table() + "\n"
    data = json.loads(metrics.read_text(encoding="utf-8"))
    assert data["means"]["I+II"]["scd"] == 4.0
    loaded = EvalReport.from_dict(data)
    assert loaded.cells == report.cells
    assert loaded.budgets == report.budgets


def test_unsupported_schema(report: EvalReport) -> None:
    """
    Reports of another schema are refused.

    :param report: two-row report
    """
    data = report.to_dict()
    data["schema"] = 2
    with pytest.raises(ValueError, match="schema"):
        EvalReport.from_dict(data)
