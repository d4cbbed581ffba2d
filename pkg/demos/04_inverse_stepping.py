"""
Inverting a monotone function by small steps
============================================

Stepping y up by e until g(y) >= x gives a discontinuous result, but one
that is never more than e away from the exact inverse.
"""

import math

import numpy as np

from looprobust import PairSampler, RobustnessSpec, abs_metric, check
from looprobust.programs import inverse_by_stepping

e = 1e-3
sqrt_ish = lambda x: inverse_by_stepping(lambda y: y * y, e, x)

xs = np.linspace(0.1, 4.0, 9)
for x in xs:
    fx = sqrt_ish(float(x))
    print(f"x={x:.3f}  f(x)={fx:.4f}  sqrt={math.sqrt(x):.4f}  gap={fx - math.sqrt(x):.1e}")

# with g(y) = 2y the exact inverse is x/2
d = abs_metric()
half = lambda x: inverse_by_stepping(lambda y: 2 * y, 0.01, x)


def near(rng):
    x = float(rng.uniform(0, 4))
    return x, x + float(rng.uniform(-0.05, 0.05))


pairs = PairSampler(near, d, 0.1, seed=0)
for k, eps in [(0.5, 0.0), (1.0, 0.0), (0.5, 0.01 + 1e-9)]:
    rep = check(half, pairs, RobustnessSpec(k, eps, 0.1, d, d), 2000)
    print(f"k={k} eps={eps:.4g}:", "holds" if rep.passed else f"{len(rep.violations)} violations")
