"""
Dijkstra is 1-Lipschitz in its edge weights
===========================================

In exact rational arithmetic the shortest-path estimates move by at most
the L1 change of the weight matrix.  The vertex order can jump between
nearby graphs, yet the four conditions still compose to (1, 0).
"""

import numpy as np

from looprobust import ConditionConstants, certify, run, trace
from looprobust.programs import (dijkstra_pairs, dijkstra_program, dijkstra_stop_region,
                                 dijkstra_stop_triples, dijkstra_witness, oracle_shortest_paths,
                                 DijkstraInstance, random_graph)

w = 6
rng = np.random.default_rng(0)
prog = dijkstra_program(w, exact=True)

g = random_graph(rng, w, exact=True, max_units=40)
print("visit order:", list(trace(prog, g)))
print("distances:  ", [str(x) for x in run(prog, g)])
print("oracle:     ", [str(x) for x in oracle_shortest_paths(DijkstraInstance(g))])

# nearby graphs often visit vertices in another order
flips = 0
for a, b in dijkstra_pairs(1.0, seed=1, w=w, exact=True).sample(300):
    flips += trace(prog, a) != trace(prog, b)
print(f"{flips} of 300 nearby pairs change the visit order")

consts = ConditionConstants(delta=1.0, k_Nstar=1.0)
cert = certify(prog, consts,
               trace_sources=[random_graph(rng, w, exact=True) for _ in range(4)],
               input_sampler=dijkstra_pairs(1.0, seed=2, w=w, exact=True),
               triple_sampler=dijkstra_stop_triples(1.0, seed=2, w=w, exact=True),
               witness=dijkstra_witness,
               region_sampler=dijkstra_stop_region(seed=2, w=w, exact=True),
               n_pairs=1000, n_triples=200)
for r in cert.conditions:
    print(r.condition, "pass" if r.passed else "FAIL")
print("bound:", (cert.bound.k0, cert.bound.eps0), " end to end:", cert.end_to_end.passed)
