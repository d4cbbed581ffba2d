"""
Scaling by 1/16 on a rounding-down grid
=======================================

Exactly, x -> x/16 is 1/16-Lipschitz.  Rounded down to multiples of
2**-32 it is only 1-Lipschitz: two neighbouring grid points can land on
outputs a full grid step apart.
"""

import math

from looprobust import Grid, PairSampler, RobustnessSpec, abs_metric, check, lift
from looprobust.robustness import estimate_frontier

grid = Grid(2.0**-32)
f = lift(lambda x: x * 2.0**-4, grid)
d = abs_metric()

# the straddling pair: inputs one step apart, outputs one step apart
x, x2 = 1.0, 1.0 - 2.0**-32
print("f(1)         =", f(x).hex())
print("f(1 - 2^-32) =", f(x2).hex())
print("input gap / output gap:", d(x, x2) / d(f(x), f(x2)))

pair = PairSampler(lambda rng: (x, x2), d)
for k in (2.0**-4, 1.0):
    rep = check(f, pair, RobustnessSpec(k, 0.0, math.inf, d, d), 1)
    print(f"k = {k:<7} eps = 0  ->", "holds" if rep.passed else "violated")

# how much additive slack does each k need on this pair?
rep = estimate_frontier(f, pair, math.inf, 1, [0.0, 2.0**-4, 0.5, 1.0], d)
for k, eps in rep.frontier:
    print(f"k = {k:<7} needs eps >= {eps:.3e}")
