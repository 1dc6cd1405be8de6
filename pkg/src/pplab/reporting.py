"""Machine-readable result emission: CSV, JSON, and gnuplot-ready data.

Column order is fixed; floats are written with round-trip precision so a
parse of any emitted file reproduces the values exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

COLUMNS = (
    "scenario",
    "d",
    "t",
    "statistic",
    "distance_name",
    "distance",
    "stderr",
    "bound",
    "bound_form",
    "rate_pred",
    "seed",
)

FORMATS = ("csv", "json", "gnuplot-dat")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _row_values(row) -> list:
    return [getattr(row, c) for c in COLUMNS]


def emit(rows, fmt: str, path) -> Path:
    """Write rows to path in the requested format and return the path."""
    if not rows:
        raise ValueError("no rows to emit")
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; pick one of {FORMATS}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            for row in rows:
                writer.writerow([_cell(v) for v in _row_values(row)])
    elif fmt == "json":
        payload = [
            {c: (v if not isinstance(v, float) else v) for c, v in zip(COLUMNS, _row_values(row))}
            for row in rows
        ]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    else:  # gnuplot-dat
        with open(path, "w") as fh:
            fh.write("# " + " ".join(COLUMNS) + "\n")
            for row in rows:
                cells = [_cell(v) for v in _row_values(row)]
                cells = [c.replace(" ", "_") if c else "nan" for c in cells]
                fh.write(" ".join(cells) + "\n")
    return path


def parse_csv(path) -> list[dict]:
    """Read an emitted CSV back into typed dictionaries."""
    out = []
    with open(path, newline="") as fh:
        for record in csv.DictReader(fh):
            out.append(_typed(record))
    return out


def parse_json(path) -> list[dict]:
    with open(path) as fh:
        return [_typed(rec) for rec in json.load(fh)]


_FLOAT_COLS = ("t", "distance", "stderr", "bound", "rate_pred")
_INT_COLS = ("d", "seed")


def _typed(record: dict) -> dict:
    out = dict(record)
    for c in _FLOAT_COLS:
        v = out.get(c)
        out[c] = float(v) if v not in ("", None) else None
    for c in _INT_COLS:
        out[c] = int(out[c])
    return out
