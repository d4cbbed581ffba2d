import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from looprobust import report
from looprobust.conditions import (
    ConditionConstants,
    ConditionReport,
    calibrate_C1,
    calibrate_C2,
    certify,
    check_C1,
    check_C2,
    check_C3,
    check_C4,
    compose_bound,
    verify_theorem_end_to_end,
)
from looprobust.metrics import abs_metric
from looprobust.programs import (
    CordicConfig,
    cordic_pairs,
    cordic_program,
    cordic_stop_region,
    cordic_stop_triples,
    cordic_witness,
    dijkstra_pairs,
    dijkstra_program,
    dijkstra_random_traces,
    dijkstra_stop_region,
    dijkstra_stop_triples,
    dijkstra_witness,
    random_graph,
)
from looprobust.robustness import PairSampler, Sampler
from looprobust.schema import SchemaProgram, foo_A, foo_B, replay_b, trace

from oracles import chord

E = 1e-6
CORDIC = cordic_program(CordicConfig(e=E))
DIJKSTRA = {w: dijkstra_program(w, exact=True) for w in range(1, 9)}

DIJKSTRA_CONSTANTS = dict(k_Nstar=1.0, eps_Nstar=0.0, k_A=0.0, eps_2=0.0,
                      k_s=0.0, eps_s=0.0, eps_t=0.0)

nonneg = st.floats(0, 1e3, allow_nan=False)


# --- compose_bound -----------------------------------------------------

def test_compose_examples():
    b = compose_bound(ConditionConstants(delta=math.inf, **DIJKSTRA_CONSTANTS))
    assert (b.k0, b.eps0, b.delta) == (1.0, 0.0, math.inf)
    b = compose_bound(ConditionConstants())
    assert (b.k0, b.eps0) == (0.0, 0.0)
    b = compose_bound(ConditionConstants(k_Nstar=2, k_A=3, k_s=5, eps_Nstar=0.1,
                                         eps_s=0.2, eps_t=0.3, eps_2=0.4))
    assert b.k0 == 17
    assert abs(b.eps0 - 2.0) <= 1e-15 * 2.0


@given(nonneg, nonneg, nonneg, nonneg, nonneg, nonneg, nonneg)
def test_compose_matches_reordered_formula(kn, en, ka, e2, ks, es, et):
    b = compose_bound(ConditionConstants(1.0, kn, en, ka, e2, ks, es, et))
    k_ref = ks * ka + kn
    eps_ref = e2 + ka * et + ka * es + en
    assert b.k0 == pytest.approx(k_ref, rel=1e-15, abs=0)
    assert b.eps0 == pytest.approx(eps_ref, rel=1e-15, abs=0) or b.eps0 == eps_ref


def test_compose_rejects_infinite_constants():
    with pytest.raises(ValueError):
        compose_bound(ConditionConstants(k_A=math.inf))
    with pytest.raises(ValueError):
        ConditionConstants(eps_2=-1.0)


def test_constants_text():
    c = ConditionConstants.from_text("k_Nstar = 1\n# comment\neps_t=0.5  # trailing\n")
    assert c.k_Nstar == 1.0 and c.eps_t == 0.5 and c.delta == math.inf
    with pytest.raises(ValueError, match="line 1"):
        ConditionConstants.from_text("k_bogus = 1")
    with pytest.raises(ValueError, match="line 2"):
        ConditionConstants.from_text("k_A = 1\nk_s = abc")


# --- C1 ------------------------------------------------------------------

def test_C1_empty_trace_is_constant():
    c = ConditionConstants(delta=0.1)
    rep = check_C1(CORDIC, [0.0], cordic_pairs(0.1), c, n_pairs=100, extra_traces=[[]])
    assert rep.passed and rep.samples == 200


def test_C1_dijkstra_exact_one_lipschitz():
    w = 5
    rng = np.random.default_rng(0)
    sources = [random_graph(rng, w, exact=True, max_units=40) for _ in range(4)]
    extra = dijkstra_random_traces(w, rng, 4)
    c = ConditionConstants(delta=1.0, **DIJKSTRA_CONSTANTS)
    rep = check_C1(DIJKSTRA[w], sources, dijkstra_pairs(1.0, seed=1, w=w, exact=True), c,
                   n_pairs=300, extra_traces=extra)
    assert rep.passed and rep.samples == 8 * 300


def test_C1_dijkstra_fails_below_one():
    w = 4
    rng = np.random.default_rng(0)
    sources = [random_graph(rng, w, exact=True, max_units=40) for _ in range(3)]
    c = ConditionConstants(delta=1.0, k_Nstar=0.5)
    rep = check_C1(DIJKSTRA[w], sources, dijkstra_pairs(1.0, seed=1, w=w, exact=True), c, 300)
    assert not rep.passed
    cx = rep.counterexamples[0]
    prog = DIJKSTRA[w]
    l = cx.inputs["trace"]
    lhs = prog.d_result(replay_b(prog, l, cx.inputs["i"]), replay_b(prog, l, cx.inputs["i2"]))
    assert lhs == cx.lhs and lhs > 0.5 * cx.inputs["d_input"]


def test_C1_cordic_frontier_then_grid_spot_check():
    sources = [0.2, 0.9, 1.4]
    fr = calibrate_C1(CORDIC, sources, cordic_pairs(0.1, seed=5), 2000, [0.0, 1.0])
    assert fr == [(0.0, 0.0)]
    # independent spot check on a 100 x 100 input grid
    grid = np.linspace(0.0, math.pi / 2, 100)
    for s in sources:
        l = trace(CORDIC, s)
        outs = {replay_b(CORDIC, l, float(z)) for z in grid}
        assert len(outs) == 1


def test_C1_non_terminating_source_is_an_error():
    prog = cordic_program(CordicConfig(e=E, max_iters=3))
    with pytest.raises(ValueError, match="does not terminate"):
        check_C1(prog, [1.0], cordic_pairs(0.1), ConditionConstants(delta=0.1), 10)


# --- C2 ------------------------------------------------------------------

def test_C2_identical_inputs():
    s = PairSampler(lambda rng: (float(rng.uniform(0, 1.5)),) * 2, abs_metric(), 0.1)
    rep = check_C2(CORDIC, s, ConditionConstants(delta=0.1), 200)
    assert rep.passed


@pytest.mark.parametrize("w", [3, 6, 8])
def test_C2_dijkstra_order_independence(w):
    c = ConditionConstants(delta=1.0, **DIJKSTRA_CONSTANTS)
    rep = check_C2(DIJKSTRA[w], dijkstra_pairs(1.0, seed=w, w=w, exact=True), c, 400)
    assert rep.passed


def test_C2_cordic_calibrate_then_check_fresh_seed():
    fr = calibrate_C2(CORDIC, cordic_pairs(0.1, seed=100), 5000, [0.0, 0.5, 1.0])
    k_A, eps_2 = next((k, e) for k, e in fr if e <= 1e-9)
    assert k_A == 1.0
    c = ConditionConstants(delta=0.1, k_A=k_A, eps_2=2 * eps_2 + 1e-12)
    assert check_C2(CORDIC, cordic_pairs(0.1, seed=101), c, 5000).passed


def test_C2_cordic_distances_match_chord_oracle():
    for i, i1 in cordic_pairs(0.1, seed=3).sample(200):
        lhs = CORDIC.d_result(foo_B(CORDIC, i, i), foo_B(CORDIC, i1, i))
        assert abs(lhs - chord(foo_A(CORDIC, i), foo_A(CORDIC, i1))) <= 1e-14


def test_C2_fails_with_too_small_constants():
    rep = check_C2(CORDIC, cordic_pairs(0.1, seed=2), ConditionConstants(delta=0.1), 100)
    assert not rep.passed
    assert all(cx.slack > 0 for cx in rep.counterexamples)


# --- C3 / C4 ---------------------------------------------------------------

def test_C3_cordic_shift_witness():
    c = ConditionConstants(delta=0.1, k_s=1.0, eps_s=0.0)
    assert check_C3(CORDIC, cordic_stop_triples(E, 0.1, seed=1), cordic_witness, c, 2000).passed


def test_C3_cordic_wrong_witness_fails():
    c = ConditionConstants(delta=0.1, k_s=1.0, eps_s=0.0)
    rep = check_C3(CORDIC, cordic_stop_triples(E, 0.1, seed=1), lambda a, i, i2: a, c, 200)
    assert not rep.passed and rep.counterexamples[0].kind == "not-stopped"


def test_C3_same_input_identity_witness():
    s = Sampler(lambda rng: (Fraction(0.5), Fraction(0.5), Fraction(0.5)))
    rep = check_C3(CORDIC, s, lambda a, i, i2: a, ConditionConstants(delta=0.1), 5)
    assert rep.passed


def test_C3_bad_witness():
    c = ConditionConstants(delta=0.1, k_s=1.0)

    def broken(a, i, i2):
        raise ValueError("no witness")

    rep = check_C3(CORDIC, cordic_stop_triples(E, 0.1, seed=1), broken, c, 10)
    assert [cx.kind for cx in rep.counterexamples] == ["bad-witness"] * 10


def test_C3_sampler_precondition_enforced():
    s = Sampler(lambda rng: (1.0, 0.0, 0.0))
    with pytest.raises(ValueError, match="stop region"):
        check_C3(CORDIC, s, cordic_witness, ConditionConstants(delta=0.1), 1)


def test_C3_dijkstra_identity_witness():
    c = ConditionConstants(delta=1.0, **DIJKSTRA_CONSTANTS)
    s = dijkstra_stop_triples(1.0, seed=2, w=6, exact=True)
    assert check_C3(DIJKSTRA[6], s, dijkstra_witness, c, 500).passed


def test_C4_cordic_and_dijkstra():
    assert check_C4(CORDIC, cordic_stop_region(E, seed=4), 2 * E, 2000).passed
    rep = check_C4(CORDIC, cordic_stop_region(E, seed=4), 1.5 * E, 200)
    assert not rep.passed
    s = dijkstra_stop_region(seed=1, w=5, exact=True)
    assert check_C4(DIJKSTRA[5], s, 0.0, 100).passed


def test_C4_equal_states():
    s = Sampler(lambda rng: (0.5, 0.5, 0.5))
    assert check_C4(CORDIC, s, 0.0, 3).passed


def test_condition_report_invariant():
    with pytest.raises(ValueError):
        ConditionReport("C1", True, 1, [object()], {}, 0)


# --- end to end -----------------------------------------------------------

def test_end_to_end_trivial_program():
    d = abs_metric()
    prog = SchemaProgram(0, 42.0, None, lambda i, a: True, None, None, None, d, d, d)
    s = PairSampler(lambda rng: (float(rng.normal()), float(rng.normal())), d)
    rep = verify_theorem_end_to_end(prog, s, ConditionConstants(), 100)
    assert rep.passed and rep.k == 0 and rep.epsilon == 0


def test_end_to_end_dijkstra_exact():
    c = ConditionConstants(delta=1.0, **DIJKSTRA_CONSTANTS)
    rep = verify_theorem_end_to_end(DIJKSTRA[7], dijkstra_pairs(1.0, seed=8, w=7, exact=True),
                                    c, 500)
    assert rep.passed


def _cordic_certificate(seed, n):
    c = ConditionConstants(delta=0.1, k_Nstar=0.0, eps_Nstar=0.0, k_A=1.0, eps_2=1e-12,
                           k_s=1.0, eps_s=0.0, eps_t=2 * E)
    return certify(CORDIC, c, trace_sources=[0.1, 0.8, 1.5],
                   input_sampler=cordic_pairs(0.1, seed=seed),
                   triple_sampler=cordic_stop_triples(E, 0.1, seed=seed),
                   witness=cordic_witness, region_sampler=cordic_stop_region(E, seed=seed),
                   n_pairs=n, n_triples=n)


def test_certificate_implication_cordic():
    # the theorem as an executable implication on the same samples
    cert = _cordic_certificate(seed=21, n=1500)
    assert all(r.passed for r in cert.conditions)
    assert cert.end_to_end.passed and cert.passed
    assert (cert.bound.k0, cert.bound.eps0) == (1.0, 2 * E + 1e-12)


def test_certificate_implication_dijkstra():
    w = 6
    rng = np.random.default_rng(3)
    c = ConditionConstants(delta=1.0, **DIJKSTRA_CONSTANTS)
    cert = certify(DIJKSTRA[w], c,
                   trace_sources=[random_graph(rng, w, exact=True) for _ in range(3)],
                   input_sampler=dijkstra_pairs(1.0, seed=3, w=w, exact=True),
                   triple_sampler=dijkstra_stop_triples(1.0, seed=3, w=w, exact=True),
                   witness=dijkstra_witness,
                   region_sampler=dijkstra_stop_region(seed=3, w=w, exact=True),
                   n_pairs=300, n_triples=100)
    assert cert.passed and (cert.bound.k0, cert.bound.eps0) == (1.0, 0.0)


def test_certificate_serialises_deterministically():
    a = report.dumps(_cordic_certificate(seed=2, n=50))
    b = report.dumps(_cordic_certificate(seed=2, n=50))
    assert a == b
    data = report.loads(a)
    assert [r["condition"] for r in data["conditions"]] == ["C1", "C2", "C3", "C4"]
