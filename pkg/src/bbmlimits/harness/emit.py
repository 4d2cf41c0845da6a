"""Write reports as CSV and JSON lines; output depends only on the report contents."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .runner import Report

__all__ = ["emit", "CSV_HEADER"]

CSV_HEADER = ("delta", "value", "stderr", "n_samples")


def _num(v):
    return repr(float(v))


def emit(report: Report, out_dir, formats=("csv", "jsonl")) -> list:
    """Write ``energies.csv`` and/or ``report.jsonl`` into ``out_dir``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        path = out / "energies.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in report.rows():
                writer.writerow([_num(row["delta"]), _num(row["value"]), _num(row["stderr"]),
                                 str(int(row["n_samples"]))])
        written.append(path)
    if "jsonl" in formats:
        path = out / "report.jsonl"
        with path.open("w") as fh:
            for row in report.rows():
                fh.write(json.dumps({"record": "delta", **row}, sort_keys=True) + "\n")
            fh.write(json.dumps(report.summary(), sort_keys=True) + "\n")
        written.append(path)
    return written
