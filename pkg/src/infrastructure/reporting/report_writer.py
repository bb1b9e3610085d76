"""Writes experiment reports as JSON lines plus a CSV index."""
import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

from src.core.exceptions import ReportWriteError
from src.core.logging import get_logger
from src.domain.models import Report, jsonable

logger = get_logger(__name__)

SUMMARY_FIELDS = ["experiment", "verdict", "rows", "passed", "failed", "informational", "seed", "wall_clock_s"]


def _dumps(record: Dict[str, Any]) -> str:
    return json.dumps(jsonable(record), sort_keys=True, allow_nan=False)


class ReportWriter:
    """
    Writes ``<out>/<experiment>.jsonl`` and ``<out>/summary.csv``.

    A report file holds a header line (experiment, seed, config echo), one
    line per row and a summary line. ``wall_clock_s`` appears only in the
    summary line, so two runs with the same seed differ only there.
    """

    def __init__(self, output_dir: str):
        self.output_dir = Path(output_dir)

    def _prepare(self) -> None:
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ReportWriteError(f"Cannot create output directory {self.output_dir}: {e}") from e

    @staticmethod
    def report_lines(report: Report) -> List[str]:
        """Serialized lines of one report, in file order."""
        header = {"type": "header", "experiment": report.experiment, "seed": report.seed,
                  "config": report.config}
        lines = [_dumps(header)]
        for row in report.rows:
            lines.append(_dumps({"type": "row", **row.to_dict()}))
        lines.append(_dumps({"type": "summary", **report.summary(), "wall_clock_s": report.wall_clock_s}))
        return lines

    def write_report(self, report: Report) -> Path:
        """
        Write one experiment report.

        Returns:
            Path of the written file

        Raises:
            ReportWriteError: the directory or the file cannot be written
        """
        self._prepare()
        path = self.output_dir / f"{report.experiment}.jsonl"
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                for line in self.report_lines(report):
                    f.write(line + "\n")
        except (OSError, ValueError) as e:
            raise ReportWriteError(f"Failed to write {path}: {e}") from e
        logger.info(f"Wrote {len(report.rows)} rows to {path}")
        return path

    def write_summary(self, reports: Sequence[Report]) -> Path:
        """Write the CSV index, one line per report."""
        self._prepare()
        path = self.output_dir / "summary.csv"
        try:
            with open(path, "w", encoding="utf-8", newline="") as f:
                writer = csv.DictWriter(f, fieldnames=SUMMARY_FIELDS)
                writer.writeheader()
                for report in reports:
                    writer.writerow({**report.summary(), "wall_clock_s": f"{report.wall_clock_s:.3f}"})
        except OSError as e:
            raise ReportWriteError(f"Failed to write {path}: {e}") from e
        logger.info(f"Wrote summary of {len(reports)} experiments to {path}")
        return path

    def write_all(self, reports: Sequence[Report]) -> List[Path]:
        """All report files followed by the index."""
        paths = [self.write_report(report) for report in reports]
        paths.append(self.write_summary(reports))
        return paths
