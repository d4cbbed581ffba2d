"""Sampled robustness analysis of loop programs.

Express a loop in the schema of :mod:`looprobust.schema`, check the four
sufficient conditions in :mod:`looprobust.conditions`, and compose them into
an end-to-end ``(k, epsilon, delta)`` robustness bound.
"""

from .conditions import (
    CompositeBound,
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
from .metrics import Metric, abs_metric, identity_metric, lp_metric
from .quantization import Grid, lift, quantize
from .robustness import (
    PairSampler,
    RobustnessReport,
    RobustnessSpec,
    Sampler,
    check,
    estimate_frontier,
)
from .schema import (
    NonTermination,
    SchemaProgram,
    Trace,
    foo_A,
    foo_B,
    replay_a,
    replay_b,
    run,
    trace,
)

__version__ = "0.1.0"
