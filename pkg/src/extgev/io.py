"""Signal files, TFR export and deterministic serialization.

Floats are written with 17 significant digits so every double round-trips
and identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from .tfr import Axis, SampledSignal, TFRResult


class SchemaError(ValueError):
    """Input file does not follow the signal schema."""


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed float formatting and insertion-ordered keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def digest(obj) -> str:
    """SHA-256 of the canonical serialization of ``obj``."""
    return hashlib.sha256(dumps(obj, indent=0).encode()).hexdigest()


def _axis_dict(ax: Axis) -> dict:
    return {"center": ax.center, "step": ax.step, "count": ax.count}


def _pairs(values) -> list:
    v = np.asarray(values, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in v]


def signal_to_dict(sig: SampledSignal) -> dict:
    return {"axis": _axis_dict(sig.axis), "values": _pairs(sig.values)}


def _number(obj, key, where):
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where}.{key} must be a number")
    return v


def signal_from_dict(obj) -> SampledSignal:
    if not isinstance(obj, dict) or "axis" not in obj or "values" not in obj:
        raise SchemaError("signal needs 'axis' and 'values'")
    ax = obj["axis"]
    if not isinstance(ax, dict):
        raise SchemaError("'axis' must be an object")
    center = _number(ax, "center", "axis")
    step = _number(ax, "step", "axis")
    count = ax.get("count")
    if isinstance(count, bool) or not isinstance(count, int):
        raise SchemaError("axis.count must be an integer")
    vals = obj["values"]
    if not isinstance(vals, list) or len(vals) != count:
        raise SchemaError(f"'values' must list exactly axis.count = {count} entries")
    out = np.empty(count, dtype=complex)
    for i, pair in enumerate(vals):
        if (not isinstance(pair, list) or len(pair) != 2
                or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in pair)):
            raise SchemaError(f"values[{i}] must be [re, im]")
        out[i] = complex(pair[0], pair[1])
    try:
        return SampledSignal(Axis(float(center), float(step), count), out)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def read_signal(path) -> SampledSignal:
    """Load a signal file; missing files raise ``FileNotFoundError``."""
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg})") from None
    return signal_from_dict(obj)


def write_signal(sig: SampledSignal, path) -> None:
    Path(path).write_text(dumps(signal_to_dict(sig)) + "\n")


def tfr_to_dict(res: TFRResult) -> dict:
    """Signal schema for both axes, row-major (x-major) values, plus kind and quadrature."""
    return {
        "kind": res.kind,
        "axis": {"x": _axis_dict(res.grid.x), "w": _axis_dict(res.grid.w)},
        "quadrature": dict(res.quadrature),
        "values": _pairs(res.values),
    }


def tfr_to_csv(res: TFRResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "w", "re", "im"])
    for i, x in enumerate(res.grid.x.points):
        for j, om in enumerate(res.grid.w.points):
            z = res.values[i, j]
            w.writerow([format_float(x), format_float(om), format_float(z.real), format_float(z.imag)])
    return buf.getvalue()


def table_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
