"""Named program bundles: everything a pipeline needs to analyse one program.

A bundle is built from run options (precision, mode, graph file...) by a
factory registered under a name.  Third-party programs can be added with
:func:`register`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from ..conditions import ConditionConstants
from ..metrics import Metric, abs_metric
from ..quantization import Grid, lift, quantize
from ..robustness import PairSampler, Sampler
from ..schema import SchemaProgram, run
from .cordic import (
    CordicConfig,
    cordic_pairs,
    cordic_program,
    cordic_random_traces,
    cordic_stop_region,
    cordic_stop_triples,
    cordic_witness,
)
from .dijkstra import (
    DijkstraInstance,
    dijkstra_pairs,
    dijkstra_program,
    dijkstra_random_traces,
    dijkstra_stop_region,
    dijkstra_stop_triples,
    dijkstra_witness,
    random_graph,
)

__all__ = ["ProgramBundle", "register", "build", "PROGRAMS"]


@dataclass
class ProgramBundle:
    name: str
    function: Callable[[Any], Any]
    d_input: Metric
    d_output: Metric
    pairs: Callable[[float, int], PairSampler]
    parse_input: Callable[[str], Any]
    program: SchemaProgram | None = None
    trace_sources: Callable[[int, int], list] | None = None
    extra_traces: Callable[[int, int], list] | None = None
    triples: Callable[[float, int], Sampler] | None = None
    region: Callable[[int], Sampler] | None = None
    witness: Callable | None = None
    # constants established analytically; None entries must be calibrated
    known_constants: dict | None = None


PROGRAMS: dict[str, Callable[[dict], ProgramBundle]] = {}


def register(name: str):
    def deco(factory):
        PROGRAMS[name] = factory
        return factory

    return deco


def build(name: str, options: dict) -> ProgramBundle:
    try:
        factory = PROGRAMS[name]
    except KeyError:
        raise ValueError(f"unknown program {name!r}; known: {', '.join(sorted(PROGRAMS))}") from None
    return factory(options)


@register("cordic")
def _cordic(opts: dict) -> ProgramBundle:
    if opts.get("mode", "double") != "double":
        raise ValueError("cordic supports only mode=double")
    e = float(opts.get("e", 1e-6))
    cfg = CordicConfig(e=e)
    prog = cordic_program(cfg)

    def sources(seed, n):
        rng = np.random.default_rng(seed)
        return [float(x) for x in rng.uniform(0.0, math.pi / 2, size=n)]

    def extra(seed, n):
        return cordic_random_traces(cfg, np.random.default_rng(seed), n)

    return ProgramBundle(
        name="cordic",
        function=lambda beta: run(prog, beta),
        d_input=prog.d_input,
        d_output=prog.d_result,
        pairs=lambda delta, seed: cordic_pairs(delta, seed),
        parse_input=float,
        program=prog,
        trace_sources=sources,
        extra_traces=extra,
        triples=lambda delta, seed: cordic_stop_triples(e, delta, seed, exact=True),
        region=lambda seed: cordic_stop_region(e, seed, exact=True),
        witness=cordic_witness,
        known_constants={"k_s": 1.0, "eps_s": 0.0, "eps_t": 2 * e},
    )


@register("dijkstra")
def _dijkstra(opts: dict) -> ProgramBundle:
    mode = opts.get("mode", "double")
    if mode not in ("double", "exact"):
        raise ValueError(f"mode must be 'double' or 'exact', got {mode!r}")
    exact = mode == "exact"
    base = None
    if opts.get("graph"):
        inst = DijkstraInstance.from_text(Path(opts["graph"]).read_text(), exact=exact)
        base, w = inst.graph, inst.w
    else:
        w = int(opts.get("w", 6))
    prog = dijkstra_program(w, exact=exact)

    def sources(seed, n):
        if base is not None:
            return [base]
        rng = np.random.default_rng(seed)
        return [random_graph(rng, w, exact, max_units=40 if j % 2 else 7992) for j in range(n)]

    def extra(seed, n):
        return dijkstra_random_traces(w, np.random.default_rng(seed), n)

    def parse(text):
        inst = DijkstraInstance.from_text(Path(text).read_text(), exact=exact)
        if inst.w != w:
            raise ValueError(f"graph {text} has {inst.w} vertices, the program expects {w}")
        return inst.graph

    return ProgramBundle(
        name=prog.name,
        function=lambda g: run(prog, g),
        d_input=prog.d_input,
        d_output=prog.d_result,
        pairs=lambda delta, seed: dijkstra_pairs(delta, seed, w=w, exact=exact, base=base),
        parse_input=parse,
        program=prog,
        trace_sources=sources,
        extra_traces=extra,
        triples=lambda delta, seed: dijkstra_stop_triples(delta, seed, w=w, exact=exact, base=base),
        region=lambda seed: dijkstra_stop_region(seed, w=w, exact=exact, base=base),
        witness=dijkstra_witness,
        known_constants={"k_Nstar": 1.0, "eps_Nstar": 0.0, "k_A": 0.0, "eps_2": 0.0,
                         "k_s": 0.0, "eps_s": 0.0, "eps_t": 0.0},
    )


QUANTUM = 2.0**-32


def quantized_pairs(delta=math.inf, seed=0) -> PairSampler:
    """Grid points in [0.5, 2] and neighbours a few grid steps below them.

    The first pair is always ``(1, 1 - 2**-32)``.
    """
    g = Grid(QUANTUM)

    def draw(rng):
        x = quantize(float(rng.uniform(0.5, 2.0)), g)
        return x, x - QUANTUM * int(rng.integers(1, 17))

    return PairSampler(draw, abs_metric(), delta, seed, fixed=[(1.0, 1.0 - QUANTUM)])


@register("quantized")
def _quantized(opts: dict) -> ProgramBundle:
    f = lift(lambda x: x * 2.0**-4, Grid(QUANTUM))
    return ProgramBundle(
        name="quantized",
        function=f,
        d_input=abs_metric(),
        d_output=abs_metric(),
        pairs=quantized_pairs,
        parse_input=float,
    )


def constants_for(bundle: ProgramBundle, delta: float, **overrides) -> ConditionConstants:
    values = dict(bundle.known_constants or {})
    values.update(overrides)
    return ConditionConstants(delta=delta, **values)
