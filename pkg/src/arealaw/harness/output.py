"""CSV and JSON writers; every float is printed with 17 significant digits."""

import csv
import json
import math
from pathlib import Path

import numpy as np

SAMPLE_HEADER = ("sample_index", "n", "beta", "negativity", "entropy", "bound", "min_eig", "rejected")
CORRELATOR_HEADER = ("distance", "mean", "stderr", "count")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(x, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        # JSON has no nan/inf
        return fmt(x) if math.isfinite(x) else "null"
    if isinstance(x, str):
        return _json_str(x)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{_json_str(str(k))}: {_json_value(v, indent, level + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        if len(x) == 0:
            return "[]"
        items = [_json_value(v, indent, level + 1) for v in x]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in x):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(pad + s for s in items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _json_str(s):
    return json.dumps(s)


def dumps(obj, indent: int = 2) -> str:
    return _json_value(obj, indent, 0) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def prefix_path(prefix, suffix) -> Path:
    p = Path(f"{prefix}_{suffix}")
    p.parent.mkdir(parents=True, exist_ok=True)
    return p
