"""Binary-decision CORDIC cosine as a schema loop.

Starting from angle 0 and the point (1, 0), each step rotates by plus or
minus a step angle, halving the step every time, until the accumulated
angle is within ``e`` of the target ``beta``.  The rotations use a table of
precomputed (cos, sin) values for the angles ``alpha0 / 2**j``, so no
gain correction is needed.

State split: the accumulated angle ``theta`` is the progress state, the
point ``(x, y)`` is the result, and each choice is ``(sigma, step)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..metrics import abs_metric, lp_metric
from ..robustness import PairSampler, Sampler
from ..schema import SchemaProgram

__all__ = [
    "CordicConfig",
    "rotation_table",
    "cordic_program",
    "oracle_cosine",
    "cordic_pairs",
    "cordic_stop_triples",
    "cordic_stop_region",
    "cordic_witness",
    "cordic_random_traces",
]

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class CordicConfig:
    e: float = 1e-6
    alpha0: float = math.pi / 4
    table_depth: int | None = None
    max_iters: int = 1000

    def __post_init__(self):
        if not (self.e > 0):
            raise ValueError(f"precision e must be positive, got {self.e!r}")
        if not (self.alpha0 > 0):
            raise ValueError("alpha0 must be positive")
        if self.table_depth is None:
            object.__setattr__(self, "table_depth", self.required_depth)
        if self.table_depth < self.required_depth:
            raise ValueError(
                f"table_depth {self.table_depth} < required {self.required_depth}"
            )

    @property
    def required_depth(self) -> int:
        return max(0, math.ceil(math.log2(self.alpha0 / self.e))) + 2


def rotation_table(cfg: CordicConfig) -> dict:
    """``{alpha0 / 2**j: (cos, sin)}`` for ``j < table_depth``.

    Halving a double is exact, so the keys are exactly the step angles the
    loop produces.
    """
    table = {}
    angle = cfg.alpha0
    for _ in range(cfg.table_depth):
        table[angle] = (math.cos(angle), math.sin(angle))
        angle /= 2
    return table


def _exact_add(a, d):
    if isinstance(a, Fraction) or isinstance(d, Fraction):
        return Fraction(a) + Fraction(d)
    return a + d


def cordic_program(cfg: CordicConfig | None = None) -> SchemaProgram:
    cfg = cfg or CordicConfig()
    table = rotation_table(cfg)
    dist = abs_metric()
    e = cfg.e

    def stop(beta, theta):
        return dist(theta, beta) <= e

    def select(theta, xy, c, beta):
        sigma = 1 if beta >= theta else -1
        return (sigma, c[1] / 2)

    def advance(theta, c):
        return _exact_add(theta, c[0] * c[1])

    def accumulate(beta, xy, c):
        sigma, alpha = c
        try:
            cs, sn = table[alpha]
        except KeyError:
            raise ValueError(f"step angle {alpha!r} is not in the rotation table") from None
        x, y = xy
        return (x * cs - sigma * y * sn, sigma * x * sn + y * cs)

    return SchemaProgram(
        a0=0.0,
        b0=(1.0, 0.0),
        # select halves the step, so the first rotation uses alpha0
        c0=(1, 2 * cfg.alpha0),
        stop=stop,
        select=select,
        advance=advance,
        accumulate=accumulate,
        d_input=dist,
        d_progress=abs_metric(),
        d_result=lp_metric(2),
        max_iters=cfg.max_iters,
        name="cordic",
    )


def oracle_cosine(beta: float) -> float:
    """Library cosine on ``[0, pi/2]`` (within one ulp on this range)."""
    if not (0 <= beta <= HALF_PI):
        raise ValueError(f"beta must lie in [0, pi/2], got {beta!r}")
    return math.cos(beta)


def _clip(x: float) -> float:
    return min(max(x, 0.0), HALF_PI)


def cordic_pairs(delta=0.1, seed=0) -> PairSampler:
    """Input pairs in ``[0, pi/2]`` at most ``delta`` apart."""

    def draw(rng):
        beta = float(rng.uniform(0.0, HALF_PI))
        if math.isinf(delta):
            return beta, float(rng.uniform(0.0, HALF_PI))
        return beta, _clip(beta + float(rng.uniform(-delta, delta)))

    return PairSampler(draw, abs_metric(), delta, seed)


def _maybe_exact(values, exact):
    return tuple(Fraction(v) for v in values) if exact else tuple(values)


def cordic_stop_triples(e=1e-6, delta=0.1, seed=0, exact=True) -> Sampler:
    """``(theta, beta, beta2)`` with ``theta`` inside the stop region of ``beta2``.

    With ``exact`` the values are converted to rationals so the condition is
    checked in real arithmetic.
    """
    spread = HALF_PI if math.isinf(delta) else delta

    def draw(rng):
        beta2 = float(rng.uniform(0.0, HALF_PI))
        theta = beta2 + float(rng.uniform(-e, e))
        beta = _clip(beta2 + float(rng.uniform(-spread, spread)))
        return _maybe_exact((theta, beta, beta2), exact)

    def accept(t):
        theta, beta, beta2 = t
        return abs(theta - beta2) <= e and abs(beta - beta2) <= delta

    return Sampler(draw, seed, accept)


def cordic_stop_region(e=1e-6, seed=0, exact=True) -> Sampler:
    """``(theta, theta2, beta)`` with both angles inside the stop region of ``beta``."""

    def draw(rng):
        beta = float(rng.uniform(0.0, HALF_PI))
        # half the draws sit on the region boundary
        if rng.random() < 0.5:
            t1, t2 = beta - e, beta + e
        else:
            t1 = beta + float(rng.uniform(-e, e))
            t2 = beta + float(rng.uniform(-e, e))
        return _maybe_exact((t1, t2, beta), exact)

    def accept(t):
        return abs(t[0] - t[2]) <= e and abs(t[1] - t[2]) <= e

    return Sampler(draw, seed, accept)


def cordic_witness(theta, beta, beta2):
    """Shift ``theta`` by the input change: stops on ``beta`` if it stopped on ``beta2``."""
    if any(isinstance(v, Fraction) for v in (theta, beta, beta2)):
        return Fraction(theta) + Fraction(beta) - Fraction(beta2)
    return theta + (beta - beta2)


def cordic_random_traces(cfg: CordicConfig, rng, count: int, max_len: int | None = None) -> list:
    """Arbitrary choice lists drawn from the rotation table."""
    angles = list(rotation_table(cfg))
    max_len = max_len or cfg.table_depth
    out = []
    for _ in range(count):
        n = int(rng.integers(0, max_len + 1))
        out.append([(int(rng.choice((-1, 1))), angles[int(rng.integers(len(angles)))])
                    for _ in range(n)])
    return out
