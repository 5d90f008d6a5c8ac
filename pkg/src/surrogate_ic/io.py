"""CSV and JSON writers and readers for solution paths and tables.

CSV files use a header row, commas, LF line endings and floats printed with
17 significant digits, so reading a file back reproduces the values exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .continuation import PathRecord, SolutionPath

__all__ = [
    "DataError",
    "fmt_float",
    "read_numeric_csv",
    "write_csv",
    "write_path_csv",
    "read_path_csv",
    "write_json",
]

_PATH_FIELDS = ["run", "k", "objective", "count", "grad_norm", "converged", "sweeps", "jump"]


class DataError(ValueError):
    """A data file could not be parsed."""


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def write_csv(path, header: list[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def read_numeric_csv(path, columns: list[str] | None = None) -> tuple[np.ndarray, list[str]]:
    """Read a headered CSV of numbers; errors name the file and line."""
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"{path}: cannot open data file ({exc.strerror})") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}:1: empty file, expected a header row") from None
        if columns is None:
            idx = list(range(len(header)))
        else:
            missing = [c for c in columns if c not in header]
            if missing:
                raise DataError(f"{path}:1: column(s) {missing} not in header {header}")
            idx = [header.index(c) for c in columns]
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{line}: expected {len(header)} fields, found {len(row)}")
            vals = []
            for i in idx:
                try:
                    v = float(row[i])
                except ValueError:
                    raise DataError(
                        f"{path}:{line}: cannot parse {row[i]!r} in column {header[i]!r} as a number"
                    ) from None
                if not math.isfinite(v):
                    raise DataError(f"{path}:{line}: non-finite value in column {header[i]!r}")
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.array(rows, dtype=float), [header[i] for i in idx]


def write_path_csv(path, paths: Mapping[str, SolutionPath]) -> None:
    """One row per (run, k) with the record fields and ``theta_<j>`` columns."""
    q = max((len(p.records[0].theta) for p in paths.values() if p.records), default=0)
    header = _PATH_FIELDS + [f"theta_{j}" for j in range(q)]
    rows = []
    for run, p in paths.items():
        for r in p.records:
            theta = list(r.theta) + [""] * (q - len(r.theta))
            rows.append([run, r.k, r.objective, r.count, r.grad_norm, r.converged, r.sweeps, r.jump, *theta])
    write_csv(path, header, rows)


def read_path_csv(path) -> dict[str, list[PathRecord]]:
    """Inverse of :func:`write_path_csv` (solver reports are not stored)."""
    out: dict[str, list[PathRecord]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        theta_cols = [c for c in reader.fieldnames if c.startswith("theta_")]
        for row in reader:
            theta = tuple(float(row[c]) for c in theta_cols if row[c] != "")
            rec = PathRecord(
                k=float(row["k"]),
                theta=theta,
                objective=float(row["objective"]),
                count=float(row["count"]),
                grad_norm=float(row["grad_norm"]),
                converged=row["converged"] == "true",
                sweeps=int(row["sweeps"]),
                jump=row["jump"] == "true",
            )
            out.setdefault(row["run"], []).append(rec)
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else fmt_float(x)
    return obj


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
