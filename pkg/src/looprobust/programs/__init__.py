"""Worked programs expressed in the loop schema, with independent oracles."""

from .cordic import (
    CordicConfig,
    cordic_pairs,
    cordic_program,
    cordic_random_traces,
    cordic_stop_region,
    cordic_stop_triples,
    cordic_witness,
    oracle_cosine,
    rotation_table,
)
from .dijkstra import (
    INF,
    DijkstraInstance,
    dijkstra_pairs,
    dijkstra_program,
    dijkstra_random_traces,
    dijkstra_stop_region,
    dijkstra_stop_triples,
    dijkstra_witness,
    oracle_shortest_paths,
    perturb_graph,
    random_graph,
    shortest_paths,
    to_exact,
)
from .stepping import inverse_by_stepping, inverse_program
