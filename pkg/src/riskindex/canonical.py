"""Canonical JSON: sorted keys, 12 significant digits, infinities as strings."""

from __future__ import annotations

import enum
import json
import math

import numpy as np

FLOAT_DIGITS = 12


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"+inf"' if x > 0 else '"-inf"'
    return format(x + 0.0, f".{FLOAT_DIGITS}g")


def _encode(obj) -> str:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, enum.Enum):
        return _encode(obj.value)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj)


def extended_real(value) -> float:
    """Inverse of the string encoding for +-inf."""
    if isinstance(value, str):
        table = {"+inf": math.inf, "inf": math.inf, "-inf": -math.inf}
        if value not in table:
            raise ValueError(f"not an extended real: {value!r}")
        return table[value]
    return float(value)
