"""CSV and JSON writers shared by all scenarios."""

import csv
import json
from pathlib import Path

import numpy as np

FLOAT_FORMAT = ".17g"


def format_value(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), FLOAT_FORMAT)


def write_csv(path, columns):
    """Write equal-length columns (an ordered mapping name -> sequence)."""
    names = list(columns)
    if names[0] != "t":
        raise ValueError("the first column must be 't'")
    data = [np.asarray(columns[n]) for n in names]
    length = {d.shape[0] for d in data}
    if len(length) != 1:
        raise ValueError(f"columns have different lengths: {sorted(length)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*data):
            w.writerow([format_value(x) for x in row])
    return path


def read_csv(path):
    """Return ``(header, array)`` of a CSV written by :func:`write_csv`."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} is empty")
    header = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(len(rows) - 1, len(header))
    return header, data


def snapshot_name(step):
    return f"snap_{step}.csv"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path
