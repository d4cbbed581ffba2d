"""Round-down grid semantics for modelling finite precision.

Values live on the grid ``{k * step | k integer}`` and every result is
rounded to the largest grid point not above it.  With a power-of-two step
the rounding is exact in double precision; other steps are approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = ["Grid", "quantize", "lift"]


@dataclass(frozen=True)
class Grid:
    step: float
    mode: str = "down"

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"grid step must be a positive finite real, got {self.step!r}")
        if self.mode != "down":
            raise ValueError("only round-down grids are supported")

    @property
    def exact(self) -> bool:
        """True when ``step`` is a power of two, i.e. rounding is bit-exact."""
        return math.frexp(self.step)[0] == 0.5


def quantize(x: float, g: Grid) -> float:
    """Largest multiple of ``g.step`` that is ``<= x``."""
    if not math.isfinite(x):
        raise ValueError(f"cannot quantize non-finite value {x!r}")
    # floor of a double is an integral double, so no int round-trip is needed
    k = float(math.floor(x / g.step))
    q = k * g.step
    if q > x:  # x / step rounded up for a non power-of-two step
        q = (k - 1.0) * g.step
    return q


def lift(f: Callable[[float], float], g: Grid) -> Callable[[float], float]:
    """Run ``f`` in grid semantics: quantize the argument and the result."""

    def lifted(x: float) -> float:
        return quantize(f(quantize(x, g)), g)

    lifted.__name__ = f"lifted_{getattr(f, '__name__', 'f')}"
    return lifted
