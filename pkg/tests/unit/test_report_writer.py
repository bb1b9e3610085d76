"""Test suite for the JSONL/CSV report writer."""
import csv
import json

import pytest

from src.core.exceptions import ReportWriteError
from src.domain.models import Report, ReportRow, Verdict
from src.infrastructure.reporting.report_writer import SUMMARY_FIELDS, ReportWriter


@pytest.fixture
def report():
    report = Report("lp_scaling", 42, config={"seed": 42, "dims": [1]}, wall_clock_s=1.25)
    report.add(ReportRow("ratio", {"p": 2.0}, 0.5, 0.5, 0.0, 1e-6, Verdict.PASS))
    report.add(ReportRow("context", {"A": [[1.0, 0.0], [0.0, 2.0]]}, note="variant"))
    return report


class TestReportLines:
    """Test cases for report_lines."""

    def test_layout(self, report):
        """Test header, one line per row and a summary trailer."""
        lines = [json.loads(line) for line in ReportWriter.report_lines(report)]
        assert [line["type"] for line in lines] == ["header", "row", "row", "summary"]
        assert lines[0]["config"] == {"seed": 42, "dims": [1]}
        assert lines[1]["case"] == "ratio"
        assert lines[2]["verdict"] == "informational"
        assert lines[-1]["wall_clock_s"] == 1.25
        assert lines[-1]["verdict"] == "pass"

    def test_timing_only_in_summary(self, report):
        """Test that only the summary line depends on the wall clock."""
        first = ReportWriter.report_lines(report)
        report.wall_clock_s = 9.0
        second = ReportWriter.report_lines(report)
        assert first[:-1] == second[:-1]
        assert first[-1] != second[-1]

    def test_non_finite_values(self):
        """Test that infinite measurements are written as strings."""
        report = Report("x", 0)
        report.add(ReportRow("unbounded", measured=float("inf")))
        row = json.loads(ReportWriter.report_lines(report)[1])
        assert row["measured"] == "inf"


class TestFiles:
    """Test cases for the written files."""

    def test_write_all(self, tmp_path, report):
        """Test that the report file and the CSV index are written."""
        out = tmp_path / "reports"
        paths = ReportWriter(str(out)).write_all([report])
        assert [p.name for p in paths] == ["lp_scaling.jsonl", "summary.csv"]
        assert len((out / "lp_scaling.jsonl").read_text().splitlines()) == 4
        with open(out / "summary.csv", newline="") as f:
            rows = list(csv.DictReader(f))
        assert list(rows[0]) == SUMMARY_FIELDS
        assert rows[0]["experiment"] == "lp_scaling"
        assert rows[0]["wall_clock_s"] == "1.250"

    def test_unwritable_directory(self, tmp_path, report):
        """Test that an output path blocked by a file raises ReportWriteError."""
        blocker = tmp_path / "blocked"
        blocker.write_text("")
        with pytest.raises(ReportWriteError):
            ReportWriter(str(blocker / "reports")).write_report(report)
