"""Sampled checks of the (k, epsilon, delta) robustness property.

A function ``f`` has the property when every pair of inputs at distance at
most ``delta`` is mapped to outputs at distance at most
``k * d_in + epsilon``.  We cannot quantify over all pairs, so a
:class:`PairSampler` supplies them.  A pass is evidence, a violation is a
concrete counterexample that can be replayed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from .metrics import Metric, Point, affine_bound, exact_sub
from .schema import NonTermination

__all__ = [
    "RobustnessSpec",
    "Violation",
    "RobustnessReport",
    "Sampler",
    "PairSampler",
    "check",
    "estimate_frontier",
    "frontier_from_distances",
]

EVIDENCE = "sampled evidence"


def _check_delta(delta) -> None:
    if not (delta >= 0):
        raise ValueError(f"delta must be >= 0 or inf, got {delta!r}")


@dataclass(frozen=True)
class RobustnessSpec:
    k: float
    epsilon: float
    delta: float
    d_in: Metric
    d_out: Metric

    def __post_init__(self):
        if not (0 <= self.k < math.inf):
            raise ValueError(f"k must be a finite nonnegative real, got {self.k!r}")
        if not (self.epsilon >= 0):
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon!r}")
        _check_delta(self.delta)


@dataclass(frozen=True)
class Violation:
    """A pair breaking the bound.  ``slack`` is how much ``d_out`` exceeds it."""

    index: int
    i: Point
    i2: Point
    d_in: Any
    d_out: Any
    slack: float
    kind: str = "bound"


@dataclass
class RobustnessReport:
    passed: bool
    pairs_checked: int
    violations: list
    frontier: list
    seed: Any
    k: Any = None
    epsilon: Any = None
    delta: Any = None
    evidence: str = EVIDENCE

    def __post_init__(self):
        if self.passed != (not self.violations):
            raise ValueError("passed must be true exactly when there are no violations")


class Sampler:
    """Seeded, restartable stream of sample points.

    ``draw(rng)`` returns one sample; ``accept`` (optional) filters them.
    Samples in ``fixed`` are emitted first (if accepted), which is how
    hand-picked counterexample candidates are injected.  Every call to
    :meth:`sample` restarts from the seed, so equal seeds always give equal
    streams.
    """

    def __init__(self, draw: Callable[[np.random.Generator], Any], seed=0,
                 accept: Callable[[Any], bool] | None = None, max_tries: int = 1000,
                 fixed: Sequence = ()):
        self.draw = draw
        self.seed = seed
        self.accept = accept
        self.max_tries = max_tries
        self.fixed = tuple(fixed)

    def with_seed(self, seed) -> "Sampler":
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.seed = seed
        return clone

    def sample(self, n: int) -> list:
        rng = np.random.default_rng(self.seed)
        out = [x for x in self.fixed if self.accept is None or self.accept(x)][:n]
        while len(out) < n:
            for _ in range(self.max_tries):
                item = self.draw(rng)
                if self.accept is None or self.accept(item):
                    break
            else:
                raise RuntimeError(
                    f"sampler rejected {self.max_tries} consecutive draws"
                )
            out.append(item)
        return out


class PairSampler(Sampler):
    """Pairs ``(i, i2)`` guaranteed to satisfy ``d_in(i, i2) <= delta``."""

    def __init__(self, draw, d_in: Metric, delta=math.inf, seed=0, max_tries: int = 1000,
                 fixed: Sequence = ()):
        _check_delta(delta)
        self.d_in = d_in
        self.delta = delta
        super().__init__(draw, seed, accept=self._within, max_tries=max_tries, fixed=fixed)

    def _within(self, pair) -> bool:
        return self.d_in(pair[0], pair[1]) <= self.delta


def _evaluate(f, x):
    try:
        return True, f(x)
    except NonTermination:
        return False, None


def _slack(d_out, bound) -> float:
    if bound == math.inf:
        return -math.inf
    if d_out == math.inf:
        return math.inf
    return float(exact_sub(d_out, bound))


def check(f: Callable[[Point], Point], sampler: PairSampler, spec: RobustnessSpec,
          n_pairs: int) -> RobustnessReport:
    """Test ``d_out(f(i), f(i2)) <= k * d_in(i, i2) + epsilon`` on sampled pairs.

    Pairs farther apart than ``spec.delta`` are skipped.  A point on which
    ``f`` does not terminate yields a violation of kind ``"no-output"``.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    violations = []
    checked = 0
    for idx, (i, i2) in enumerate(sampler.sample(n_pairs)):
        d_in = spec.d_in(i, i2)
        if not d_in <= spec.delta:
            continue
        checked += 1
        ok1, y1 = _evaluate(f, i)
        ok2, y2 = _evaluate(f, i2)
        if not (ok1 and ok2):
            violations.append(Violation(idx, i, i2, d_in, math.inf, math.inf, "no-output"))
            continue
        d_out = spec.d_out(y1, y2)
        bound = affine_bound(spec.k, d_in, spec.epsilon)
        if not d_out <= bound:
            violations.append(Violation(idx, i, i2, d_in, d_out, _slack(d_out, bound)))
    return RobustnessReport(
        passed=not violations,
        pairs_checked=checked,
        violations=violations,
        frontier=[],
        seed=sampler.seed,
        k=spec.k,
        epsilon=spec.epsilon,
        delta=spec.delta,
    )


def _tight_epsilon(k, distances) -> float:
    """Smallest float eps >= 0 with ``d_out <= k*d_in + eps`` on every pair."""
    worst = 0.0
    for d_in, d_out in distances:
        if d_out == math.inf:
            if affine_bound(k, d_in, 0.0) != math.inf:
                return math.inf
            continue
        gap = exact_sub(d_out, affine_bound(k, d_in, 0.0))
        if gap > worst:
            worst = gap
    eps = float(worst)
    if isinstance(worst, Fraction) and eps < worst:
        eps = math.nextafter(eps, math.inf)
    # rounding in k*d_in + eps may still leave a pair just outside the bound
    bad = [p for p in distances if not p[1] <= affine_bound(k, p[0], eps)]
    while bad:
        eps = math.nextafter(eps, math.inf)
        bad = [p for p in bad if not p[1] <= affine_bound(k, p[0], eps)]
    return eps


def frontier_from_distances(distances: Sequence[tuple], k_grid: Sequence[float]) -> list:
    """Pareto-minimal ``(k, eps)`` pairs covering the given ``(d_in, d_out)`` pairs."""
    if not k_grid:
        raise ValueError("k_grid must be nonempty")
    if any(b < a for a, b in zip(k_grid, k_grid[1:])):
        raise ValueError("k_grid must be sorted ascending")
    if any(k < 0 for k in k_grid):
        raise ValueError("k_grid entries must be nonnegative")
    distances = list(distances)
    frontier = []
    for k in k_grid:
        eps = _tight_epsilon(k, distances)
        if not frontier or eps < frontier[-1][1]:
            frontier.append((float(k), eps))
    return frontier


def estimate_frontier(f: Callable[[Point], Point], sampler: PairSampler, delta,
                      n_pairs: int, k_grid: Sequence[float],
                      d_out: Metric) -> RobustnessReport:
    """Fit the (k, eps) envelope of ``f`` on sampled pairs within ``delta``.

    For each ``k`` in ``k_grid`` the smallest ``eps`` consistent with every
    pair is computed; the Pareto-minimal points form the frontier.
    Non-terminating samples are reported as violations and excluded from
    the fit.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    _check_delta(delta)
    distances = []
    violations = []
    for idx, (i, i2) in enumerate(sampler.sample(n_pairs)):
        din = sampler.d_in(i, i2)
        if not din <= delta:
            continue
        ok1, y1 = _evaluate(f, i)
        ok2, y2 = _evaluate(f, i2)
        if not (ok1 and ok2):
            violations.append(Violation(idx, i, i2, din, math.inf, math.inf, "no-output"))
            continue
        distances.append((din, d_out(y1, y2)))
    return RobustnessReport(
        passed=not violations,
        pairs_checked=len(distances) + len(violations),
        violations=violations,
        frontier=frontier_from_distances(distances, k_grid),
        seed=sampler.seed,
        delta=delta,
    )
