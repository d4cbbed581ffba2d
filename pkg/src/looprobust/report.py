"""Deterministic JSON-style text for reports and certificates.

Reals are written with 17 significant digits so they round-trip through
``float``; exact rationals are written as ``"p/q"`` strings; infinities use
the ``Infinity`` token that :mod:`json` reads back.  Key order follows the
order of the input mappings, so equal reports give byte-identical text.
"""

from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction

from .schema import format_real

__all__ = ["to_plain", "dumps", "loads"]


def to_plain(obj):
    """Convert dataclasses, tuples and numbers into JSON-ready values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    return obj


def _real(x) -> str:
    if isinstance(x, Fraction):
        return json.dumps(format_real(x))
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format_real(x)


def _emit(obj, indent: int, level: int, out: list) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, (float, Fraction)):
        out.append(_real(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for n, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(k)}: ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        # short lists of scalars stay on one line
        if all(not isinstance(v, (dict, list)) for v in obj):
            parts = []
            for v in obj:
                buf: list = []
                _emit(v, indent, level, buf)
                parts.append("".join(buf))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for n, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    out: list = []
    _emit(to_plain(obj), indent, 0, out)
    out.append("\n")
    return "".join(out)


def loads(text: str):
    """Parse report text back into plain Python values (rationals stay strings)."""
    return json.loads(text)
