"""
Certifying CORDIC cosine through the four loop conditions
=========================================================

The loop halves a rotation angle each step until the accumulated angle
is within e of the input.  We calibrate the two constants that need
measuring, check all four conditions on fresh samples, and compare the
composed bound with a direct end-to-end check.
"""

import math

import numpy as np

from looprobust import ConditionConstants, certify, run, trace
from looprobust.conditions import calibrate_C1, calibrate_C2
from looprobust.programs import (CordicConfig, cordic_pairs, cordic_program, cordic_stop_region,
                                 cordic_stop_triples, cordic_witness, oracle_cosine)

e = 1e-6
prog = cordic_program(CordicConfig(e=e))

betas = np.linspace(0, math.pi / 2, 7)
for beta in betas:
    x, y = run(prog, float(beta))
    print(f"beta={beta:.4f}  cos~{x:.8f}  err={abs(x - oracle_cosine(float(beta))):.1e}"
          f"  steps={len(trace(prog, float(beta)))}")

delta = 0.1
sources = [0.2, 0.7, 1.3]
c1 = calibrate_C1(prog, sources, cordic_pairs(delta, seed=1), 2000, [0.0, 1.0])
c2 = calibrate_C2(prog, cordic_pairs(delta, seed=1), 2000, [0.0, 0.5, 1.0])
print("replay frontier (k, eps):", c1)
print("swap frontier (k, eps):  ", c2)

consts = ConditionConstants(delta=delta, k_Nstar=0.0, eps_Nstar=0.0,
                            k_A=1.0, eps_2=1e-12, k_s=1.0, eps_s=0.0, eps_t=2 * e)
cert = certify(prog, consts,
               trace_sources=sources,
               input_sampler=cordic_pairs(delta, seed=2),
               triple_sampler=cordic_stop_triples(e, delta, seed=2),
               witness=cordic_witness,
               region_sampler=cordic_stop_region(e, seed=2),
               n_pairs=2000, n_triples=2000)

for r in cert.conditions:
    print(r.condition, "pass" if r.passed else "FAIL", r.samples, "samples")
print("composed bound: k0 =", cert.bound.k0, " eps0 =", cert.bound.eps0)
print("end to end:", "pass" if cert.end_to_end.passed else "FAIL")
