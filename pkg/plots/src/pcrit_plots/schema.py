"""CSV loading and schema validation for the documented pcrit artifacts.

This tool reads only the published CSV schemas; it has zero coupling to the
producing package's internals.
"""

from __future__ import annotations

import csv
from pathlib import Path

REQUIRED_COLUMNS = {
    "phase_diagram": ("alpha", "beta", "predicted"),
    "scaling": ("T", "I1", "I2"),
    "barrier_profile": ("radius", "v", "grad_norm", "p_laplacian", "residual"),
}

OPTIONAL_COLUMNS = {
    "phase_diagram": ("observed",),
    "scaling": (),
    "barrier_profile": (),
}

FLOAT_COLUMNS = ("alpha", "beta", "r", "t_blow", "sup_max", "T", "I1", "I2", "F",
                 "U0", "radius", "v", "grad_norm", "p_laplacian", "residual")


class SchemaError(ValueError):
    """Input CSV does not match the documented schema; carries the column diff."""

    def __init__(self, kind: str, missing, found):
        self.missing = tuple(missing)
        self.found = tuple(found)
        super().__init__(f"{kind} input is missing columns {list(missing)}; "
                         f"found columns {list(found)}")


def load_csv(path, kind: str) -> list:
    """Rows as dicts with float-typed numeric fields; validates columns for `kind`."""
    if kind not in REQUIRED_COLUMNS:
        raise ValueError(f"unknown plot kind {kind!r}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        found = tuple(reader.fieldnames or ())
        missing = [c for c in REQUIRED_COLUMNS[kind] if c not in found]
        if missing:
            raise SchemaError(kind, missing, found)
        rows = []
        for raw in reader:
            row = {}
            for key, val in raw.items():
                if key in FLOAT_COLUMNS:
                    row[key] = float(val) if val not in ("", None) else None
                else:
                    row[key] = val if val not in (None,) else ""
            rows.append(row)
    if not rows:
        raise SchemaError(kind, ["<at least one data row>"], found)
    return rows


def sibling_summary(path) -> dict:
    """summary.json next to the CSV, when present (source of critical thresholds)."""
    import json

    candidate = Path(path).parent / "summary.json"
    if candidate.exists():
        try:
            return json.loads(candidate.read_text())
        except (OSError, ValueError):
            return {}
    return {}
