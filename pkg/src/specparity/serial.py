"""Deterministic text serialization.

Every float written by this package goes through ``fmt_float`` (17
significant digits, round-trip exact), so identical runs produce
byte-identical CSV and JSON artifacts.
"""
from __future__ import annotations

import json
import math
import numbers


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value cannot be serialized: {x!r}")
    return format(x, ".17g")


def fmt_complex(z: complex) -> str:
    z = complex(z)
    sign = "+" if (z.imag >= 0 or math.isnan(z.imag)) else "-"
    return f"{fmt_float(z.real)}{sign}{fmt_float(abs(z.imag))}j"


def fmt_value(v) -> str:
    if isinstance(v, numbers.Complex) and not isinstance(v, numbers.Real):
        return fmt_complex(v)
    return fmt_float(v)


def _render(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, numbers.Integral):
        return str(int(obj))
    if isinstance(obj, numbers.Real):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{pad}{json.dumps(str(k))}: {_render(v, indent, level + 1)}"
            for k, v in obj.items()
        )
        return "{\n" + items + "\n" + close + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(f"{pad}{_render(v, indent, level + 1)}" for v in obj)
        return "[\n" + items + "\n" + close + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Render a JSON document with 17-significant-digit floats.

    The stdlib encoder formats floats with repr, which is shortest-form;
    this renderer pins the documented 17g format instead. Key order is
    preserved, so output is byte-stable for a fixed input structure.
    """
    return _render(obj, indent, 0) + "\n"
