"""Column-wise comparison of two runs (single CSV files or output directories)."""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import SchemaMismatchError
from .output import read_csv

ATOL = 1e-12
DIAGNOSTIC_FILES = ("diagnostics.csv", "cross.csv")


def relative_difference(a, b, atol=ATOL):
    """``max|a - b| / max(max|a|, max|b|)``; differences below ``atol`` count as zero."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = np.abs(a - b)
    if diff.size == 0 or float(np.max(diff)) <= atol:
        return 0.0
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return float(np.max(diff) / scale)


@dataclass
class CompareResult:
    tol: float
    columns: dict = field(default_factory=dict)  # "file:column" -> rel. difference

    @property
    def max_rel(self):
        return max(self.columns.values(), default=0.0)

    @property
    def passed(self):
        return self.max_rel <= self.tol

    def worst(self):
        if not self.columns:
            return None
        return max(self.columns, key=self.columns.get)


def compare_files(a, b, tol, atol=ATOL, label=None):
    ha, da = read_csv(a)
    hb, db = read_csv(b)
    label = label or Path(a).name
    if ha != hb:
        raise SchemaMismatchError(f"{label}: headers differ ({ha} vs {hb})")
    if da.shape != db.shape:
        raise SchemaMismatchError(f"{label}: row counts differ ({da.shape[0]} vs {db.shape[0]})")
    res = CompareResult(tol=tol)
    for j, name in enumerate(ha):
        res.columns[f"{label}:{name}"] = relative_difference(da[:, j], db[:, j], atol)
    return res


def _csv_set(root, include_diagnostics):
    files = sorted(p.relative_to(root).as_posix() for p in Path(root).rglob("*.csv"))
    if not include_diagnostics:
        files = [f for f in files if Path(f).name not in DIAGNOSTIC_FILES]
    return files


def compare_runs(path_a, path_b, tol, include_diagnostics=False, atol=ATOL):
    """Compare two CSV files, or every field CSV of two output directories.

    Diagnostics tables are skipped unless ``include_diagnostics``: their
    integrated entropy column can sit near zero, where a relative measure is
    dominated by cancellation.
    """
    a, b = Path(path_a), Path(path_b)
    if a.is_file() and b.is_file():
        return compare_files(a, b, tol, atol)
    if a.is_dir() != b.is_dir():
        raise SchemaMismatchError("cannot compare a file against a directory")
    if not a.exists() or not b.exists():
        raise FileNotFoundError(f"no such run: {a if not a.exists() else b}")
    fa, fb = _csv_set(a, include_diagnostics), _csv_set(b, include_diagnostics)
    if fa != fb:
        only = sorted(set(fa) ^ set(fb))
        raise SchemaMismatchError(f"runs contain different CSV files: {', '.join(only)}")
    if not fa:
        raise SchemaMismatchError("no CSV files to compare")
    res = CompareResult(tol=tol)
    for name in fa:
        res.columns.update(compare_files(a / name, b / name, tol, atol, label=name).columns)
    return res
