import csv
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..logger import setup_logger

logger = setup_logger(__name__)


@dataclass
class TrialRecord:
    method: str
    rate: float
    trial: int
    seed: int
    accuracy: Optional[float]  # None when the cell failed
    iterations: Optional[int]
    wall_time: float
    warnings: list[str] = field(default_factory=list)
    params: dict[str, Any] = field(default_factory=dict)  # beta, gamma, latent_dim for sweep cells
    failure: Optional[dict[str, Any]] = None

    @property
    def failed(self) -> bool:
        return self.failure is not None

    def body(self) -> dict[str, Any]:
        """Record content without timing, identical across reruns of the same config."""
        data = asdict(self)
        data.pop("wall_time")
        return data


@dataclass
class AggregateRow:
    method: str
    rate: float
    mean: Optional[float]
    std: Optional[float]
    trials: int
    failures: int
    params: dict[str, Any] = field(default_factory=dict)

    def cell(self) -> str:
        """'mean(std)' in percent, two decimals."""
        if self.mean is None:
            return "failed"
        return f"{100.0 * self.mean:.2f}({100.0 * self.std:.2f})"


def _params_key(params: dict[str, Any]) -> tuple:
    return tuple(sorted(params.items()))


def aggregate(records: list[TrialRecord]) -> list[AggregateRow]:
    """Mean and population std of accuracy per (method, rate, params), in first-seen order."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for record in records:
        groups.setdefault((record.method, record.rate, _params_key(record.params)), []).append(record)

    rows = []
    for (method, rate, _), members in groups.items():
        accuracies = np.array([r.accuracy for r in members if not r.failed], dtype=float)
        rows.append(AggregateRow(
            method=method,
            rate=rate,
            mean=float(np.mean(accuracies)) if accuracies.size else None,
            std=float(np.std(accuracies)) if accuracies.size else None,
            trials=int(accuracies.size),
            failures=len(members) - int(accuracies.size),
            params=dict(members[0].params),
        ))
    return rows


class ExperimentReport:
    def __init__(self, config: Optional[dict[str, Any]] = None):
        self.config: dict[str, Any] = config or {}
        self.records: list[TrialRecord] = []
        self.created_at: datetime = datetime.now()

    def add_record(self, record: TrialRecord):
        self.records.append(record)

    def extend(self, records: list[TrialRecord]):
        self.records.extend(records)

    @property
    def aggregates(self) -> list[AggregateRow]:
        return aggregate(self.records)

    @property
    def failures(self) -> list[TrialRecord]:
        return [record for record in self.records if record.failed]

    @property
    def has_failures(self) -> bool:
        return any(record.failed for record in self.records)

    @property
    def methods(self) -> list[str]:
        return list(dict.fromkeys(record.method for record in self.records))

    @property
    def rates(self) -> list[float]:
        return sorted({record.rate for record in self.records})

    def body(self) -> dict[str, Any]:
        return {
            "config": self.config,
            "records": [record.body() for record in self.records],
            "aggregates": [asdict(row) for row in self.aggregates],
        }

    def get_full_report(self) -> dict[str, Any]:
        return {
            "created_at": self.created_at.isoformat(),
            "config": self.config,
            "records": [asdict(record) for record in self.records],
            "aggregates": [asdict(row) for row in self.aggregates],
        }

    def save_to_file(self, filepath: str | Path):
        """Save report to JSON file"""
        with open(filepath, "w") as f:
            json.dump(self.get_full_report(), f, indent=2, default=str)

    @classmethod
    def load_from_file(cls, filepath: str | Path) -> "ExperimentReport":
        """Load report from JSON file; aggregates are recomputed from the records."""
        with open(filepath, "r") as f:
            data = json.load(f)

        report = cls(config=data.get("config", {}))
        if data.get("created_at"):
            report.created_at = datetime.fromisoformat(data["created_at"])
        for record_data in data.get("records", []):
            report.add_record(TrialRecord(
                method=record_data["method"],
                rate=record_data["rate"],
                trial=record_data["trial"],
                seed=record_data["seed"],
                accuracy=record_data["accuracy"],
                iterations=record_data["iterations"],
                wall_time=record_data["wall_time"],
                warnings=record_data.get("warnings", []),
                params=record_data.get("params", {}),
                failure=record_data.get("failure"),
            ))
        return report


def format_table(report: ExperimentReport, methods: Optional[list[str]] = None, rates: Optional[list[float]] = None) -> str:
    """Rows are methods, columns label rates, cells 'mean(std)' in percent."""
    methods = report.methods if methods is None else methods
    rates = report.rates if rates is None else rates
    cells = {(row.method, row.rate): row.cell() for row in report.aggregates if not row.params}

    headers = ["method"] + [f"{100.0 * rate:g}%" for rate in rates]
    body = [[method] + [cells.get((method, rate), "-") for rate in rates] for method in methods]
    widths = [max(len(str(line[i])) for line in [headers] + body) for i in range(len(headers))]

    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for line in body:
        lines.append("  ".join(str(value).ljust(w) for value, w in zip(line, widths)).rstrip())
    return "\n".join(lines) + "\n"


SWEEP_COLUMNS = ["beta", "gamma", "latent_dim", "method", "rate", "mean", "std", "trials"]


def write_long_csv(rows: list[AggregateRow], path: str | Path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([
                row.params.get("beta", ""),
                row.params.get("gamma", ""),
                row.params.get("latent_dim", ""),
                row.method,
                row.rate,
                "" if row.mean is None else repr(row.mean),
                "" if row.std is None else repr(row.std),
                row.trials,
            ])


def emit(report: ExperimentReport, out_dir: str | Path, formats: tuple[str, ...] = ("json", "table")) -> list[Path]:
    """
    Write the report under out_dir.

    Formats: "json" (report.json, every record), "table" (table.txt) and
    "csv" (aggregates.csv, one row per aggregate in long format).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        path = out_dir / "report.json"
        report.save_to_file(path)
        written.append(path)
    if "table" in formats:
        path = out_dir / "table.txt"
        path.write_text(format_table(report))
        written.append(path)
    if "csv" in formats:
        path = out_dir / "aggregates.csv"
        write_long_csv(report.aggregates, path)
        written.append(path)
    logger.info(f"Report written to {', '.join(str(p) for p in written)}")
    return written
