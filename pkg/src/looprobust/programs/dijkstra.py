"""Dijkstra's single-source shortest paths as a schema loop.

The progress state is ``(count, mark)``, the result is the path-estimate
vector and each choice is the vertex ``u`` to settle next.  Edge length
999 stands in for a missing edge and also caps every estimate.

Two evaluation modes: doubles, or exact rationals (``exact=True``), in
which every estimate is a :class:`~fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..metrics import identity_metric, lp_metric
from ..robustness import PairSampler, Sampler
from ..schema import SchemaProgram, run

__all__ = [
    "INF",
    "DijkstraInstance",
    "dijkstra_program",
    "shortest_paths",
    "oracle_shortest_paths",
    "random_graph",
    "perturb_graph",
    "dijkstra_pairs",
    "dijkstra_stop_triples",
    "dijkstra_stop_region",
    "dijkstra_witness",
    "dijkstra_random_traces",
    "to_exact",
]

INF = 999


def to_exact(graph) -> tuple:
    return tuple(tuple(Fraction(x) for x in row) for row in graph)


@dataclass(frozen=True)
class DijkstraInstance:
    graph: tuple
    source: int = 0

    def __post_init__(self):
        g = tuple(tuple(row) for row in self.graph)
        object.__setattr__(self, "graph", g)
        w = len(g)
        if w < 1:
            raise ValueError("graph must have at least one vertex")
        for r, row in enumerate(g):
            if len(row) != w:
                raise ValueError(f"row {r} has {len(row)} entries, expected {w}")
            for c, x in enumerate(row):
                if not (0 <= x <= INF):
                    raise ValueError(f"entry ({r},{c}) = {x!r} outside [0, {INF}]")
            if row[r] != 0:
                raise ValueError(f"diagonal entry ({r},{r}) must be 0")
        if not (0 <= self.source < w):
            raise ValueError(f"source {self.source} out of range")

    @property
    def w(self) -> int:
        return len(self.graph)

    def exact(self) -> "DijkstraInstance":
        return DijkstraInstance(to_exact(self.graph), self.source)

    def to_text(self) -> str:
        from ..schema import format_real

        lines = [str(self.w)]
        lines += [" ".join(format_real(x) for x in row) for row in self.graph]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, exact: bool = False) -> "DijkstraInstance":
        """First line ``w``, then ``w`` rows of ``w`` reals."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines:
            raise ValueError("empty graph file")
        try:
            w = int(lines[0])
        except ValueError:
            raise ValueError(f"line 1: vertex count expected, got {lines[0]!r}") from None
        if len(lines) - 1 != w:
            raise ValueError(f"expected {w} matrix rows, found {len(lines) - 1}")
        conv = Fraction if exact else float
        rows = []
        for n, ln in enumerate(lines[1:], 2):
            try:
                rows.append(tuple(conv(tok) for tok in ln.split()))
            except ValueError:
                raise ValueError(f"line {n}: malformed number in {ln!r}") from None
        return cls(tuple(rows))


def dijkstra_program(inst, *, exact: bool = False, tie_break: str = "low") -> SchemaProgram:
    """Schema instance for graphs with the vertex count of ``inst``.

    ``inst`` may be a :class:`DijkstraInstance` or a vertex count.  Ties
    between unmarked vertices go to the lowest index, or the highest with
    ``tie_break="high"``.
    """
    if isinstance(inst, DijkstraInstance):
        w, source = inst.w, inst.source
    else:
        w, source = int(inst), 0
    if w < 1:
        raise ValueError("need at least one vertex")
    if tie_break not in ("low", "high"):
        raise ValueError(f"tie_break must be 'low' or 'high', got {tie_break!r}")
    num = Fraction if exact else float
    cap = num(INF)

    def stop(graph, a):
        return a[0] >= w

    def select(a, pe, u_prev, graph):
        mark = a[1]
        best = None
        for v in range(w):
            if mark[v]:
                continue
            if (best is None or pe[v] < pe[best]
                    or (tie_break == "high" and pe[v] == pe[best])):
                best = v
        return best

    def advance(a, u):
        count, mark = a
        return (count + 1, mark[:u] + (True,) + mark[u + 1:])

    def accumulate(graph, pe, u):
        base = pe[u]
        row = graph[u]
        if exact:
            return tuple(min(pe[v], base + Fraction(row[v])) for v in range(w))
        return tuple(min(pe[v], base + row[v]) for v in range(w))

    b0 = tuple(num(0) if v == source else cap for v in range(w))
    return SchemaProgram(
        a0=(0, (False,) * w),
        b0=b0,
        c0=source,
        stop=stop,
        select=select,
        advance=advance,
        accumulate=accumulate,
        d_input=lp_metric(1),
        d_progress=identity_metric(),
        d_result=lp_metric(math.inf),
        max_iters=w + 1,
        name="dijkstra-exact" if exact else "dijkstra",
    )


def oracle_shortest_paths(inst: DijkstraInstance) -> tuple:
    """Source distances by Floyd-Warshall, capped at 999.

    Arithmetic happens in the entry type, so rational graphs give exact
    results.
    """
    g = [list(row) for row in inst.graph]
    w = inst.w
    for k in range(w):
        gk = g[k]
        for r in range(w):
            grk = g[r][k]
            gr = g[r]
            for c in range(w):
                via = grk + gk[c]
                if via < gr[c]:
                    gr[c] = via
    exact = any(isinstance(x, Fraction) for row in inst.graph for x in row)
    cap = Fraction(INF) if exact else float(INF)
    return tuple(min(cap, d) if v != inst.source else (Fraction(0) if exact else 0.0)
                 for v, d in enumerate(g[inst.source]))


def random_graph(rng: np.random.Generator, w: int, exact: bool = False,
                 max_units: int = 7992, unit: float = 0.125) -> tuple:
    """Random ``w x w`` graph with entries in ``{unit * k : 0 <= k <= max_units}``."""
    ks = rng.integers(0, max_units + 1, size=(w, w))
    rows = []
    for r in range(w):
        row = tuple(0.0 if c == r else float(ks[r, c]) * unit for c in range(w))
        rows.append(row)
    g = tuple(rows)
    return to_exact(g) if exact else g


def perturb_graph(rng: np.random.Generator, graph, budget: float, exact: bool = False) -> tuple:
    """Move off-diagonal entries by a total L1 amount of at most ``budget``."""
    w = len(graph)
    cells = [(r, c) for r in range(w) for c in range(w) if r != c]
    if not cells or budget <= 0:
        return graph
    m = int(rng.integers(1, len(cells) + 1))
    chosen = rng.choice(len(cells), size=m, replace=False)
    total = float(rng.uniform(0.0, budget))
    shares = rng.dirichlet(np.ones(m)) * total
    signs = rng.choice((-1.0, 1.0), size=m)
    rows = [list(row) for row in graph]
    for idx, share, sign in zip(chosen, shares, signs):
        r, c = cells[int(idx)]
        step = Fraction(float(share)) * int(sign) if exact else float(share) * float(sign)
        rows[r][c] = (Fraction if exact else float)(min(max(rows[r][c] + step, 0), INF))
    return tuple(tuple(row) for row in rows)


def _draw_graph(rng, w, w_max, exact, base=None):
    if base is not None:
        return base
    if w is None:
        w = int(rng.integers(1, w_max + 1))
    # small edge ranges make near-ties, which exercise tie-breaking
    max_units = 40 if rng.random() < 0.5 else 7992
    return random_graph(rng, w, exact, max_units=max_units)


def dijkstra_pairs(delta=1.0, seed=0, w: int | None = None, w_max: int = 8,
                   exact: bool = False, base=None) -> PairSampler:
    """Graph pairs at L1 distance at most ``delta``.

    Graphs have ``w`` vertices, or a random count up to ``w_max`` when ``w``
    is None; a fixed ``base`` graph replaces the random one.  A schema
    program is built for one vertex count, so the condition checkers need a
    fixed ``w``.
    """
    if base is not None:
        base = to_exact(base) if exact else tuple(tuple(float(x) for x in r) for r in base)
    budget = 10.0 if math.isinf(delta) else delta

    def draw(rng):
        g = _draw_graph(rng, w, w_max, exact, base)
        return g, perturb_graph(rng, g, budget, exact)

    return PairSampler(draw, lp_metric(1), delta, seed)


_PROGRAMS: dict = {}


def shortest_paths(graph, exact: bool = False) -> tuple:
    """Run the schema program sized for ``graph``."""
    key = (len(graph), exact)
    if key not in _PROGRAMS:
        _PROGRAMS[key] = dijkstra_program(len(graph), exact=exact)
    return run(_PROGRAMS[key], graph)


def _full_state(w: int):
    return (w, (True,) * w)


def dijkstra_stop_triples(delta=1.0, seed=0, w: int | None = None, w_max: int = 8,
                          exact: bool = False, base=None) -> Sampler:
    """``(a, i, i2)`` with ``a`` the all-marked state and ``i, i2`` nearby graphs."""
    pairs = dijkstra_pairs(delta, seed, w, w_max, exact, base)

    def draw(rng):
        i, i2 = pairs.draw(rng)
        return _full_state(len(i)), i, i2

    return Sampler(draw, seed, accept=lambda t: pairs._within((t[1], t[2])))


def dijkstra_stop_region(seed=0, w: int | None = None, w_max: int = 8, exact: bool = False,
                         base=None) -> Sampler:
    """``(a, a2, i)`` with both states stopping on graph ``i``.

    Reachable progress states have ``count`` equal to the number of marks,
    so the only stopping state is the all-marked one.
    """

    def draw(rng):
        g = _draw_graph(rng, w, w_max, exact, base)
        return _full_state(len(g)), _full_state(len(g)), g

    return Sampler(draw, seed)


def dijkstra_witness(a, i, i2):
    """The stop test ignores the graph, so the state itself is a witness."""
    return a


def dijkstra_random_traces(w: int, rng, count: int, max_len: int | None = None) -> list:
    """Arbitrary vertex lists, repeats allowed."""
    max_len = max_len or 2 * w
    return [[int(v) for v in rng.integers(0, w, size=int(rng.integers(0, max_len + 1)))]
            for _ in range(count)]
