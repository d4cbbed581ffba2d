import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from looprobust.metrics import (
    abs_metric,
    affine_bound,
    identity_metric,
    lp_metric,
    same_point,
)

reals = st.floats(-1e6, 1e6, allow_nan=False)
vec3 = st.lists(reals, min_size=3, max_size=3)


def test_abs_examples():
    d = abs_metric()
    assert d(3.0, 1.5) == 1.5
    assert d(-1.0, 2.0) == 3.0
    assert d(7.25, 7.25) == 0.0


def test_abs_rejects_vectors():
    with pytest.raises(TypeError):
        abs_metric()((1.0, 2.0), (1.0, 2.0))
    with pytest.raises(TypeError):
        abs_metric()(True, 1.0)


def test_lp_examples():
    assert lp_metric(1)([1, 2], [2, 0]) == 3.0
    assert lp_metric(2)([0, 0], [3, 4]) == 5.0
    assert lp_metric(math.inf)([1, 5], [2, 2]) == 3.0


def test_lp_length_mismatch_names_both_lengths():
    with pytest.raises(ValueError, match="2 != 3"):
        lp_metric(1)([1, 2], [1, 2, 3])


def test_lp_flattens_matrices():
    assert lp_metric(1)(((0, 1), (2, 0)), ((0, 0), (0, 0))) == 3


def test_lp_rejects_other_p():
    with pytest.raises(ValueError):
        lp_metric(3)


def test_identity_examples():
    d = identity_metric()
    assert d("t", "t") == 0
    assert d("t", "u") == math.inf
    assert d((3, (True, False)), (3, (True, False))) == 0
    assert d((3, (True, False)), (3, (False, True))) == math.inf


def test_identity_compares_reals_bitwise():
    d = identity_metric()
    assert d(0.0, -0.0) == math.inf
    assert d(0.1 + 0.2, 0.3) == math.inf


def test_exact_mode_stays_exact():
    d = abs_metric()
    x = Fraction(1, 3)
    assert d(x, 0.5) == Fraction(1, 2) - x
    assert isinstance(lp_metric(1)([x], [0.25]), Fraction)


def test_affine_bound_extended_arithmetic():
    assert affine_bound(0.0, math.inf, 0.5) == 0.5
    assert affine_bound(2.0, math.inf, 0.0) == math.inf
    assert affine_bound(1.0, 3.0, math.inf) == math.inf
    assert affine_bound(1.0, Fraction(1, 3), 0.0) == Fraction(1, 3)


@pytest.mark.parametrize("metric", [abs_metric(), identity_metric()], ids=["abs", "identity"])
@given(x=reals, y=reals, z=reals)
def test_scalar_metric_axioms(metric, x, y, z):
    assert metric(x, x) == 0
    assert metric(x, y) == metric(y, x)
    # with inf absorbing, x + inf = inf and v <= inf
    lhs, rhs = metric(x, z), metric(x, y) + metric(y, z)
    assert lhs <= rhs * (1 + 1e-12) or rhs == math.inf


@pytest.mark.parametrize("p", [1, 2, math.inf])
@given(x=vec3, y=vec3, z=vec3)
def test_lp_metric_axioms(p, x, y, z):
    d = lp_metric(p)
    assert d(x, x) == 0
    assert d(x, y) == d(y, x)
    assert d(x, z) <= (d(x, y) + d(y, z)) * (1 + 1e-12)


@given(x=vec3, y=vec3)
def test_linf_is_max_of_component_distances(x, y):
    assert lp_metric(math.inf)(x, y) == max(abs(a - b) for a, b in zip(x, y))


@given(x=st.recursive(reals | st.integers() | st.booleans(),
                      lambda ch: st.tuples(ch, ch), max_leaves=6))
def test_same_point_is_reflexive(x):
    assert same_point(x, x)
