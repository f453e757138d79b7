"""Delimited-text traces and result tables."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .pulse import SampledTrace


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _numeric_rows(path: Path) -> np.ndarray:
    rows = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").replace(";", " ").split()
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                if rows:
                    raise ValueError(f"{path}: non-numeric row {line!r}") from None
                continue  # header
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged rows")
    return np.array(rows, dtype=float)


def read_columns(path, n_columns: int = 2) -> np.ndarray:
    data = _numeric_rows(Path(path))
    if data.shape[1] < n_columns:
        raise ValueError(f"{path}: expected at least {n_columns} columns")
    return data[:, :n_columns]


def load_trace(path, rel_tol: float = 1e-6) -> SampledTrace:
    """Two-column (time_seconds, amplitude) text file on a uniform grid."""
    data = read_columns(path, 2)
    if data.shape[0] < 16:
        raise ValueError(f"{path}: trace has {data.shape[0]} rows, need at least 16")
    t, a = data[:, 0], data[:, 1]
    dt = (t[-1] - t[0]) / (t.size - 1)
    if not dt > 0:
        raise ValueError(f"{path}: time column must increase")
    dev = float(np.max(np.abs(np.diff(t) - dt)) / dt)
    if dev > rel_tol:
        raise ValueError(f"{path}: non-uniform time grid (max relative step deviation {dev:.3g})")
    return SampledTrace(float(t[0]), float(dt), a)


def write_trace(path, trace: SampledTrace) -> None:
    s = trace.samples
    amp = np.abs(s) if np.iscomplexobj(s) else s
    write_table(path, ("time_s", "amplitude"), zip(trace.times, amp))


def write_table(path, columns, rows, metadata: dict | None = None) -> None:
    """CSV with optional ``# key = value`` lines, a header row, 17-digit floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key} = {fmt(value)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            row = list(row)
            if len(row) != len(columns):
                raise ValueError("row length does not match columns")
            w.writerow([fmt(v) for v in row])


def read_table(path):
    """Inverse of :func:`write_table`: (metadata, columns, rows of strings)."""
    meta = {}
    lines = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition(" = ")
                meta[key] = value
            else:
                lines.append(line)
    reader = csv.reader(lines)
    columns = next(reader)
    return meta, columns, [row for row in reader]


def parse_float(text: str) -> float:
    return float(text) if text not in ("", "nan") else math.nan
