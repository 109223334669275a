"""CSV schema validation for the experiment summary files.

The plotting side never touches simulator internals; these schemas are
the whole contract. A mismatch fails loudly with the offending columns
named.
"""
from __future__ import annotations

import csv
from pathlib import Path

UNSTABLE_RATIO_COLUMNS = ["router", "num_gateways", "ratio", "n_unstable",
                          "n_tested"]
LATENCY_COLUMNS = ["num_gateways", "router", "mean_queue_ms", "mean_tx_ms",
                   "mean_prop_ms"]
TIMESERIES_COLUMNS = ["router", "num_gateways", "sim_time_s", "e2e_ms"]


class SchemaError(ValueError):
    """Input CSV does not match the published schema."""

    def __init__(self, path, missing=(), unexpected=()):
        self.missing = list(missing)
        self.unexpected = list(unexpected)
        parts = []
        if self.missing:
            parts.append(f"missing columns: {', '.join(self.missing)}")
        if self.unexpected:
            parts.append(f"unexpected columns: {', '.join(self.unexpected)}")
        super().__init__(f"{path}: " + "; ".join(parts))


class EmptyInputError(ValueError):
    """Input CSV parses but holds no data rows."""


def read_rows(path: str | Path, columns: list[str]) -> list[dict]:
    """Rows of a summary CSV, validated against the expected header."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        unexpected = [c for c in header if c not in columns]
        if missing or unexpected:
            raise SchemaError(path, missing, unexpected)
        rows = list(reader)
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    return rows
