"""CSV output with a fixed numeric format (17 significant digits)."""

from __future__ import annotations

import csv

import numpy as np

__all__ = ["write_columns", "write_rows"]


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def write_columns(path, names, columns):
    """Write equal-length columns under a header row."""
    columns = [np.asarray(c) for c in columns]
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise ValueError("columns must have equal length")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for i in range(n):
            w.writerow([_fmt(c[i]) for c in columns])


def write_rows(path, names, rows):
    """Write an iterable of row tuples under a header row."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
