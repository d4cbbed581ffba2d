"""Approximate inverse of an increasing function by fixed-size steps.

``y`` starts at 0 and grows by ``e`` while ``g(y) < i``.  The result
over-approximates ``g^-1(i)`` by less than ``e``; the function is
discontinuous yet robust with epsilon ``e``.
"""

from __future__ import annotations

from typing import Callable

from ..metrics import abs_metric
from ..schema import DEFAULT_MAX_ITERS, SchemaProgram, run

__all__ = ["inverse_program", "inverse_by_stepping"]


def inverse_program(g: Callable[[float], float], e: float,
                    max_iters: int = DEFAULT_MAX_ITERS) -> SchemaProgram:
    """Schema form: ``y`` is both the progress and the result state."""
    if not (e > 0):
        raise ValueError(f"step e must be positive, got {e!r}")
    return SchemaProgram(
        a0=0.0,
        b0=0.0,
        c0=e,
        stop=lambda i, y: not (g(y) < i),
        select=lambda y, b, c, i: e,
        advance=lambda y, c: y + c,
        accumulate=lambda i, y, c: y + c,
        d_input=abs_metric(),
        d_progress=abs_metric(),
        d_result=abs_metric(),
        max_iters=max_iters,
        name="inverse-by-stepping",
    )


def inverse_by_stepping(g: Callable[[float], float], e: float, i: float,
                        max_iters: int = DEFAULT_MAX_ITERS) -> float:
    """Smallest ``y`` in ``{0, e, 2e, ...}`` (as accumulated) with ``g(y) >= i``.

    Raises :class:`~looprobust.schema.NonTermination` if ``max_iters`` steps
    are not enough.
    """
    return run(inverse_program(g, e, max_iters), i)
