"""Deterministic CSV output: fixed column order, round-trip exact floats."""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["write_csv", "read_csv"]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    """Write columns under a header row, floats at 17 significant digits."""
    columns = [np.atleast_1d(np.asarray(c)) for c in columns]
    if len(columns) != len(header):
        raise ValueError("one column per header entry required")
    nrows = len(columns[0])
    for c in columns:
        if len(c) != nrows:
            raise ValueError("all columns must share a length")
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(nrows):
            fh.write(",".join(_fmt(c[i]) for c in columns) + "\n")


def read_csv(path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Read a header + float matrix CSV written by write_csv."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"empty CSV: {path}")
    header = lines[0].split(",")
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    mat = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, {name: mat[:, j] for j, name in enumerate(header)}
