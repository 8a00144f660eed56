"""Deterministic report writers: JSON and CSV with 17 significant digits."""
import json
import math

import numpy as np

from .errors import WaveBranchError


class NonFiniteOutput(WaveBranchError):
    """A number about to be emitted is NaN or infinite."""


def fmt(x):
    return format(float(x), ".17g")


def _check(x, path):
    if not math.isfinite(x):
        raise NonFiniteOutput(f"non-finite value at {path or 'top level'}: {x!r}")


def dumps(obj, indent=1, allow_inf=False, _level=0, _path=""):
    """JSON text with floats as %.17g; dict keys are kept in insertion order."""
    pad = "\n" + " " * (indent * (_level + 1))
    end = "\n" + " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return json.dumps(obj.item() if isinstance(obj, np.generic) else obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if allow_inf and math.isinf(x):
            return json.dumps("inf" if x > 0 else "-inf")
        _check(x, _path)
        return fmt(x)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            json.dumps(str(k)) + ": " + dumps(v, indent, allow_inf, _level + 1, f"{_path}.{k}")
            for k, v in obj.items()
        ]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, allow_inf, _level + 1, f"{_path}[{i}]") for i, v in enumerate(obj)) + "]"
        items = [dumps(v, indent, allow_inf, _level + 1, f"{_path}[{i}]") for i, v in enumerate(obj)]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def csv_text(header, rows):
    """CSV with a header line; floats as %.17g, ints and strings verbatim."""
    lines = [",".join(header)]
    for r in rows:
        cells = []
        for v in r:
            if isinstance(v, (float, np.floating)):
                _check(float(v), ",".join(header))
                cells.append(fmt(v))
            elif v is None:
                cells.append("")
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
