"""Independent reference computations used by the tests.

Nothing here imports the code under test.
"""

import itertools
import math
from fractions import Fraction


def shortest_by_enumeration(graph, source=0, cap=999):
    """Cheapest simple path from ``source`` to every vertex, by brute force."""
    w = len(graph)
    best = [Fraction(cap)] * w
    best[source] = Fraction(0)
    others = [v for v in range(w) if v != source]
    for r in range(1, w):
        for mid in itertools.permutations(others, r):
            path = (source,) + mid
            cost = sum(Fraction(graph[a][b]) for a, b in zip(path, path[1:]))
            if cost < best[path[-1]]:
                best[path[-1]] = cost
    return best


def signed_angle_sum(choices):
    """Exact rational sum of sigma * step over a CORDIC choice list."""
    return sum((Fraction(s) * Fraction(a) for s, a in choices), Fraction(0))


def step(x):
    return 0.0 if x < 0 else 1.0


def step_violations_on_grid(k, eps, delta, n=200):
    """Count straddling grid pairs that break ``|step(x)-step(y)| <= k|x-y| + eps``."""
    bad = 0
    for a in range(1, n + 1):
        for b in range(0, n):
            x = -a * (delta / 2) / n
            y = b * (delta / 2) / n
            d = y - x
            if d <= delta and 1.0 > k * d + eps:
                bad += 1
    return bad


def chord(theta1, theta2):
    """Euclidean distance between unit vectors at two angles."""
    return 2 * abs(math.sin((theta1 - theta2) / 2))
