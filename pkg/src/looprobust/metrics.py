"""Metric spaces over program states.

Distances take values in the extended nonnegative reals: ``math.inf`` is a
legal distance and is absorbing under addition and comparison.  Points are
plain Python values (numbers, tuples of numbers, nested tuples).  Reals are
doubles by default; when either operand is a :class:`fractions.Fraction`
the computation is carried out exactly, which is how the exact-rational
evaluation mode is realised.
"""

from __future__ import annotations

import math
import numbers
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

Point = Any

__all__ = [
    "Metric",
    "abs_metric",
    "lp_metric",
    "identity_metric",
    "exact_sub",
    "affine_bound",
    "same_point",
    "flatten",
]


@dataclass(frozen=True)
class Metric:
    """A named distance function ``(x, y) -> [0, inf]``."""

    distance: Callable[[Point, Point], Any]
    name: str = "metric"

    def __call__(self, x: Point, y: Point):
        return self.distance(x, y)

    def __repr__(self) -> str:
        return f"Metric({self.name})"


def _is_scalar(x) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


def exact_sub(x, y):
    """``x - y``, promoted to exact rationals if either side is a Fraction.

    Python's ``Fraction - float`` silently returns a float; this keeps the
    exact mode exact.
    """
    if isinstance(x, Fraction) or isinstance(y, Fraction):
        return Fraction(x) - Fraction(y)
    return x - y


def affine_bound(k, d, eps):
    """Evaluate ``k * d + eps`` in extended reals with ``0 * inf = 0``."""
    if d == math.inf:
        return math.inf if k > 0 else eps
    if eps == math.inf:
        return math.inf
    if any(isinstance(v, Fraction) for v in (k, d, eps)):
        return Fraction(k) * Fraction(d) + Fraction(eps)
    return k * d + eps


def flatten(x) -> list:
    """Flatten nested sequences of reals into a flat list."""
    if _is_scalar(x):
        return [x]
    out = []
    for item in x:
        out.extend(flatten(item))
    return out


def abs_metric() -> Metric:
    """The usual distance ``|x - y|`` on scalar reals."""

    def distance(x, y):
        if not (_is_scalar(x) and _is_scalar(y)):
            raise TypeError(
                f"abs metric needs scalar reals, got {type(x).__name__} "
                f"and {type(y).__name__}"
            )
        return abs(exact_sub(x, y))

    return Metric(distance, "abs")


def lp_metric(p) -> Metric:
    """L1, L2 or L-infinity distance between equal-length real vectors.

    Nested sequences (matrices) are flattened row-major first.
    """
    if p not in (1, 2, math.inf):
        raise ValueError(f"p must be 1, 2 or inf, got {p!r}")

    def distance(x, y):
        xs, ys = flatten(x), flatten(y)
        if len(xs) != len(ys):
            raise ValueError(
                f"vector lengths differ: {len(xs)} != {len(ys)}"
            )
        diffs = [abs(exact_sub(a, b)) for a, b in zip(xs, ys)]
        if not diffs:
            return 0.0
        if p == 1:
            return sum(diffs)
        if p == math.inf:
            return max(diffs)
        if any(isinstance(v, Fraction) for v in diffs):
            return math.sqrt(sum(v * v for v in diffs))
        return math.hypot(*diffs)

    name = "Linf" if p == math.inf else f"L{p}"
    return Metric(distance, name)


def same_point(x, y) -> bool:
    """Structural equality with floats compared bitwise.

    Distinguishes ``0.0`` from ``-0.0`` and treats identical NaN payloads as
    equal, so it is suitable for "bitwise-identical result" checks.
    """
    if isinstance(x, float) and isinstance(y, float):
        return struct.pack("<d", x) == struct.pack("<d", y)
    if isinstance(x, float) or isinstance(y, float):
        return False
    if isinstance(x, (tuple, list)) and isinstance(y, (tuple, list)):
        return len(x) == len(y) and all(same_point(a, b) for a, b in zip(x, y))
    return type(x) is type(y) and x == y


def identity_metric() -> Metric:
    """Discrete metric: 0 on equal points, ``inf`` otherwise."""

    def distance(x, y):
        return 0 if same_point(x, y) else math.inf

    return Metric(distance, "identity")
