"""Sufficient conditions for robustness of a schema loop, checked by sampling.

Four conditions on a :class:`~looprobust.schema.SchemaProgram` together
imply that the whole loop is robust with constants obtained by
:func:`compose_bound`:

* C1: replaying any fixed choice list on nearby inputs moves the result
  by at most ``k_Nstar * d + eps_Nstar``;
* C2: replaying two inputs' choice lists on the same input gives results
  whose distance is bounded through the distance of their final progress
  states (``k_A``, ``eps_2``);
* C3: a progress state that stops on ``i2`` has, within
  ``k_s * d + eps_s``, a state that stops on ``i`` (checked against a
  user-supplied witness);
* C4: any two states stopping on the same input are ``eps_t`` apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Any, Callable, Sequence

from .metrics import Point, affine_bound, exact_sub
from .robustness import (
    EVIDENCE,
    PairSampler,
    RobustnessReport,
    RobustnessSpec,
    Sampler,
    check,
    frontier_from_distances,
)
from .schema import NonTermination, SchemaProgram, Trace, replay_a, replay_b, run, trace

__all__ = [
    "ConditionConstants",
    "CompositeBound",
    "Counterexample",
    "ConditionReport",
    "Certificate",
    "compose_bound",
    "check_C1",
    "check_C2",
    "check_C3",
    "check_C4",
    "calibrate_C1",
    "calibrate_C2",
    "verify_theorem_end_to_end",
    "certify",
]

WitnessFn = Callable[[Point, Point, Point], Point]


@dataclass(frozen=True)
class ConditionConstants:
    delta: float = math.inf
    k_Nstar: float = 0.0
    eps_Nstar: float = 0.0
    k_A: float = 0.0
    eps_2: float = 0.0
    k_s: float = 0.0
    eps_s: float = 0.0
    eps_t: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (v >= 0):
                raise ValueError(f"{f.name} must be nonnegative, got {v!r}")

    def subset(self, *names) -> dict:
        return {n: getattr(self, n) for n in names}

    @classmethod
    def from_text(cls, text: str) -> "ConditionConstants":
        """Parse ``name = value`` lines; ``#`` starts a comment."""
        known = {f.name for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'name = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in known:
                raise ValueError(f"line {lineno}: unknown constant {key!r}")
            try:
                values[key] = float(val)
            except ValueError:
                raise ValueError(f"line {lineno}: {key} is not a real: {val!r}") from None
        return cls(**values)


@dataclass(frozen=True)
class CompositeBound:
    k0: float
    eps0: float
    delta: float


def compose_bound(constants: ConditionConstants) -> CompositeBound:
    """End-to-end constants implied by C1-C4.

    ``k0 = k_Nstar + k_A * k_s`` and
    ``eps0 = eps_Nstar + k_A * (eps_s + eps_t) + eps_2``.
    """
    c = constants
    for name in ("k_Nstar", "eps_Nstar", "k_A", "eps_2", "k_s", "eps_s", "eps_t"):
        if not math.isfinite(getattr(c, name)):
            raise ValueError(f"{name} must be finite to compose a bound")
    k0 = c.k_Nstar + c.k_A * c.k_s
    eps0 = c.eps_Nstar + c.k_A * (c.eps_s + c.eps_t) + c.eps_2
    return CompositeBound(k0=k0, eps0=eps0, delta=c.delta)


@dataclass(frozen=True)
class Counterexample:
    kind: str
    inputs: dict
    lhs: Any = None
    rhs: Any = None
    slack: float = math.inf


@dataclass
class ConditionReport:
    condition: str
    passed: bool
    samples: int
    counterexamples: list
    constants_used: dict
    seed: Any
    evidence: str = EVIDENCE

    def __post_init__(self):
        if self.passed != (not self.counterexamples):
            raise ValueError("passed must be true exactly when there are no counterexamples")


def _slack(lhs, rhs) -> float:
    if lhs == math.inf:
        return math.inf
    return float(exact_sub(lhs, rhs))


def _source_traces(prog: SchemaProgram, trace_sources) -> list:
    out = []
    for s in trace_sources:
        try:
            out.append(trace(prog, s))
        except NonTermination as exc:
            raise ValueError(f"trace source {s!r} does not terminate: {exc}") from exc
    return out


def check_C1(prog: SchemaProgram, trace_sources: Sequence[Point], input_sampler: PairSampler,
             constants: ConditionConstants, n_pairs: int = 1000,
             extra_traces: Sequence = ()) -> ConditionReport:
    """Replay robustness: each fixed trace, replayed on nearby inputs.

    Traces come from running ``prog`` on ``trace_sources``; ``extra_traces``
    adds arbitrary (e.g. mutated) choice lists.  The same input pairs are
    used for every trace.
    """
    traces = _source_traces(prog, trace_sources) + [Trace(t) for t in extra_traces]
    spec = RobustnessSpec(constants.k_Nstar, constants.eps_Nstar, constants.delta,
                          prog.d_input, prog.d_result)
    found = []
    samples = 0
    for t_idx, l in enumerate(traces):
        rep = check(lambda z, l=l: replay_b(prog, l, z), input_sampler, spec, n_pairs)
        samples += rep.pairs_checked
        for v in rep.violations:
            found.append(Counterexample(
                "bound",
                {"trace_index": t_idx, "trace": list(l.items), "i": v.i, "i2": v.i2,
                 "d_input": v.d_in},
                lhs=v.d_out,
                rhs=affine_bound(spec.k, v.d_in, spec.epsilon),
                slack=v.slack,
            ))
    return ConditionReport("C1", not found, samples, found,
                           constants.subset("delta", "k_Nstar", "eps_Nstar"),
                           input_sampler.seed)


def calibrate_C1(prog: SchemaProgram, trace_sources: Sequence[Point], input_sampler: PairSampler,
                 n_pairs: int, k_grid: Sequence[float], extra_traces: Sequence = ()) -> list:
    """(k_Nstar, eps_Nstar) frontier measured over all given traces."""
    traces = _source_traces(prog, trace_sources) + [Trace(t) for t in extra_traces]
    pairs = [p for p in input_sampler.sample(n_pairs)]
    distances = []
    for l in traces:
        for i, i2 in pairs:
            distances.append((prog.d_input(i, i2),
                              prog.d_result(replay_b(prog, l, i), replay_b(prog, l, i2))))
    return frontier_from_distances(distances, k_grid)


def _c2_distances(prog: SchemaProgram, i, i1):
    li, li1 = trace(prog, i), trace(prog, i1)
    d_b = prog.d_result(replay_b(prog, li, i), replay_b(prog, li1, i))
    d_a = prog.d_progress(replay_a(prog, li1), replay_a(prog, li))
    return d_a, d_b


def check_C2(prog: SchemaProgram, input_sampler: PairSampler, constants: ConditionConstants,
             n_pairs: int = 1000) -> ConditionReport:
    """Result distance of swapped traces bounded by final progress distance.

    An infinite right-hand side makes the inequality vacuously true.
    """
    found = []
    samples = 0
    for i, i1 in input_sampler.sample(n_pairs):
        if not prog.d_input(i, i1) <= constants.delta:
            continue
        samples += 1
        try:
            d_a, d_b = _c2_distances(prog, i, i1)
        except NonTermination:
            found.append(Counterexample("no-output", {"i": i, "i1": i1}))
            continue
        rhs = affine_bound(constants.k_A, d_a, constants.eps_2)
        if not d_b <= rhs:
            found.append(Counterexample("bound", {"i": i, "i1": i1, "d_progress": d_a},
                                        lhs=d_b, rhs=rhs, slack=_slack(d_b, rhs)))
    return ConditionReport("C2", not found, samples, found,
                           constants.subset("delta", "k_A", "eps_2"), input_sampler.seed)


def calibrate_C2(prog: SchemaProgram, input_sampler: PairSampler, n_pairs: int,
                 k_grid: Sequence[float]) -> list:
    """(k_A, eps_2) frontier measured on sampled input pairs."""
    distances = [_c2_distances(prog, i, i1) for i, i1 in input_sampler.sample(n_pairs)]
    return frontier_from_distances(distances, k_grid)


def check_C3(prog: SchemaProgram, triple_sampler: Sampler, witness: WitnessFn,
             constants: ConditionConstants, n_triples: int = 1000) -> ConditionReport:
    """Stop-region stability, checked against an explicit witness.

    For each sampled ``(a, i, i2)`` with ``stop(i2, a)``, the witness
    ``a2 = witness(a, i, i2)`` must satisfy ``stop(i, a2)`` and
    ``d_progress(a, a2) <= k_s * d_input(i2, i) + eps_s``.
    """
    found = []
    for a, i, i2 in triple_sampler.sample(n_triples):
        d_in = prog.d_input(i2, i)
        if not d_in <= constants.delta:
            raise ValueError(f"triple sampler emitted inputs {d_in!r} apart, beyond delta")
        if not prog.stop(i2, a):
            raise ValueError(f"triple sampler emitted a={a!r} outside the stop region of {i2!r}")
        inputs = {"a": a, "i": i, "i2": i2}
        try:
            a2 = witness(a, i, i2)
            d_a = prog.d_progress(a, a2)
            stops = prog.stop(i, a2)
        except (TypeError, ValueError, ArithmeticError, IndexError) as exc:
            found.append(Counterexample("bad-witness", dict(inputs, error=str(exc))))
            continue
        rhs = affine_bound(constants.k_s, d_in, constants.eps_s)
        if not d_a <= rhs:
            found.append(Counterexample("distance", dict(inputs, witness=a2),
                                        lhs=d_a, rhs=rhs, slack=_slack(d_a, rhs)))
        elif not stops:
            found.append(Counterexample("not-stopped", dict(inputs, witness=a2)))
    return ConditionReport("C3", not found, n_triples, found,
                           constants.subset("delta", "k_s", "eps_s"), triple_sampler.seed)


def check_C4(prog: SchemaProgram, region_sampler: Sampler, eps_t: float,
             n_triples: int = 1000) -> ConditionReport:
    """Diameter of the stop region: ``d_progress(a, a2) <= eps_t``."""
    found = []
    for a, a2, i in region_sampler.sample(n_triples):
        if not (prog.stop(i, a) and prog.stop(i, a2)):
            raise ValueError(f"region sampler emitted states outside the stop region of {i!r}")
        d_a = prog.d_progress(a, a2)
        if not d_a <= eps_t:
            found.append(Counterexample("diameter", {"a": a, "a2": a2, "i": i},
                                        lhs=d_a, rhs=eps_t, slack=_slack(d_a, eps_t)))
    return ConditionReport("C4", not found, n_triples, found, {"eps_t": eps_t},
                           region_sampler.seed)


def verify_theorem_end_to_end(prog: SchemaProgram, input_sampler: PairSampler,
                              constants: ConditionConstants,
                              n_pairs: int = 1000) -> RobustnessReport:
    """Check the whole loop against the composed bound on sampled pairs."""
    bound = compose_bound(constants)
    spec = RobustnessSpec(bound.k0, bound.eps0, bound.delta, prog.d_input, prog.d_result)
    return check(lambda i: run(prog, i), input_sampler, spec, n_pairs)


@dataclass
class Certificate:
    program: str
    constants: ConditionConstants
    bound: CompositeBound
    conditions: list
    end_to_end: RobustnessReport
    passed: bool = field(init=False)
    evidence: str = EVIDENCE

    def __post_init__(self):
        self.passed = all(r.passed for r in self.conditions) and self.end_to_end.passed


def certify(prog: SchemaProgram, constants: ConditionConstants, *, trace_sources,
            input_sampler: PairSampler, triple_sampler: Sampler, witness: WitnessFn,
            region_sampler: Sampler, n_pairs: int = 1000, n_triples: int = 1000,
            extra_traces: Sequence = (), c1_pairs: int | None = None) -> Certificate:
    """Run C1-C4, compose the bound and check it end to end."""
    reports = [
        check_C1(prog, trace_sources, input_sampler, constants,
                 c1_pairs or n_pairs, extra_traces),
        check_C2(prog, input_sampler, constants, n_pairs),
        check_C3(prog, triple_sampler, witness, constants, n_triples),
        check_C4(prog, region_sampler, constants.eps_t, n_triples),
    ]
    e2e = verify_theorem_end_to_end(prog, input_sampler, constants, n_pairs)
    return Certificate(prog.name, constants, compose_bound(constants), reports, e2e)
