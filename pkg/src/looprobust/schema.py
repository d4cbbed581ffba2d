"""The loop template and the programs derived from it.

A :class:`SchemaProgram` is the loop::

    a = a0; b = b0; c = c0
    while not stop(i, a):
        c = select(a, b, c, i)
        a = advance(a, c)
        b = accumulate(i, b, c)
    return b

``a`` witnesses progress (the stop test only looks at ``a`` and the input),
``b`` accumulates the result and ``c`` is the per-iteration choice.  From
one program we derive trace extraction and two replays that feed a recorded
list of choices back into only the ``b`` half or only the ``a`` half.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .metrics import Metric, Point

__all__ = [
    "NonTermination",
    "SchemaProgram",
    "Trace",
    "run",
    "trace",
    "replay_b",
    "replay_a",
    "foo_B",
    "foo_A",
    "format_real",
    "parse_real",
]

DEFAULT_MAX_ITERS = 10**6


class NonTermination(RuntimeError):
    """Raised when a loop does not satisfy its stop predicate in time."""

    def __init__(self, iterations: int, a, b, c, i=None):
        super().__init__(f"no stop after {iterations} iterations")
        self.iterations = iterations
        self.a = a
        self.b = b
        self.c = c
        self.i = i


@dataclass(frozen=True)
class SchemaProgram:
    """An instance of the loop template.

    ``stop(i, a)`` is the STOP predicate: the loop runs while it is false.
    ``select(a, b, c, i)`` yields the next choice ``c``, ``advance(a, c)``
    the next progress state and ``accumulate(i, b, c)`` the next result
    state.  The three metrics measure inputs, progress states and results.
    """

    a0: Point
    b0: Point
    c0: Point
    stop: Callable[[Point, Point], bool]
    select: Callable[[Point, Point, Point, Point], Point]
    advance: Callable[[Point, Point], Point]
    accumulate: Callable[[Point, Point, Point], Point]
    d_input: Metric
    d_progress: Metric
    d_result: Metric
    max_iters: int = DEFAULT_MAX_ITERS
    name: str = "program"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")


@dataclass(frozen=True)
class Trace:
    """The choices ``c`` made by one run, in execution order."""

    items: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.items)

    def __getitem__(self, j):
        return self.items[j]

    def to_text(self) -> str:
        """One choice per line, fields comma separated, reals round-trippable."""
        lines = []
        for c in self.items:
            fields = c if isinstance(c, (tuple, list)) else (c,)
            lines.append(",".join(_format_field(v) for v in fields))
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_text(cls, text: str) -> "Trace":
        items = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                fields = tuple(_parse_field(tok.strip()) for tok in line.split(","))
            except ValueError as exc:
                raise ValueError(f"trace line {lineno}: {exc}") from None
            items.append(fields[0] if len(fields) == 1 else fields)
        return cls(tuple(items))


_INT_RE = re.compile(r"[+-]?\d+\Z")


def format_real(x) -> str:
    """Format a real with 17 significant digits; floats always carry a point."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    s = "%.17g" % x
    if _INT_RE.match(s):
        s += ".0"
    return s


def parse_real(tok: str):
    if "/" in tok:
        return Fraction(tok)
    return float(tok)


def _format_field(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return format_real(v)


def _parse_field(tok: str):
    if tok in ("true", "false"):
        return tok == "true"
    if _INT_RE.match(tok):
        return int(tok)
    return parse_real(tok)


def _execute(prog: SchemaProgram, i: Point, record: bool):
    a, b, c = prog.a0, prog.b0, prog.c0
    items = []
    n = 0
    while not prog.stop(i, a):
        if n >= prog.max_iters:
            raise NonTermination(n, a, b, c, i)
        c = prog.select(a, b, c, i)
        if record:
            items.append(c)
        a = prog.advance(a, c)
        b = prog.accumulate(i, b, c)
        n += 1
    return b, items


def run(prog: SchemaProgram, i: Point) -> Point:
    """Execute the loop on input ``i`` and return the final result state."""
    return _execute(prog, i, record=False)[0]


def trace(prog: SchemaProgram, i: Point) -> Trace:
    """Execute the loop on ``i`` and return the list of choices it made."""
    return Trace(_execute(prog, i, record=True)[1])


def replay_b(prog: SchemaProgram, l, i: Point) -> Point:
    """Fold ``accumulate`` over a given choice list, on input ``i``.

    Any list is legal; the progress state is never computed.
    """
    b = prog.b0
    for c in l:
        b = prog.accumulate(i, b, c)
    return b


def replay_a(prog: SchemaProgram, l) -> Point:
    """Fold ``advance`` over a given choice list."""
    a = prog.a0
    for c in l:
        a = prog.advance(a, c)
    return a


def foo_B(prog: SchemaProgram, i: Point, i2: Point) -> Point:
    """Replay the choices made on ``i`` against input ``i2``."""
    return replay_b(prog, trace(prog, i), i2)


def foo_A(prog: SchemaProgram, i: Point) -> Point:
    """Final progress state reached by the run on ``i``."""
    return replay_a(prog, trace(prog, i))
