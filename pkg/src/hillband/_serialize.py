"""Deterministic JSON/CSV writers with 17-significant-digit floats.

json.dumps does not expose float formatting, so a tiny recursive dumper
keeps the byte output reproducible across runs and platforms.
"""

from __future__ import annotations

import json
import math

__all__ = ["fmt_float", "dumps", "csv_line"]


def fmt_float(x: float) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def dumps(obj, indent: int = 0) -> str:
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {dumps(v, indent + 2)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        inner = [dumps(v, indent) for v in obj]
        return "[" + ", ".join(inner) + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def csv_line(fields) -> str:
    parts = []
    for f in fields:
        if isinstance(f, bool):
            parts.append("true" if f else "false")
        elif isinstance(f, float):
            parts.append(fmt_float(f))
        else:
            parts.append(str(f))
    return ",".join(parts)
