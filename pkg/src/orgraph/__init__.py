"""Learning hidden graphs with OR queries: classical learners and a simulated quantum pipeline."""

from .cgt import CgtInstance, CostModel, cgt_classical, cgt_quantum, cost
from .classical import KnownEdges, learn_all_edges_classical, learn_bipartite_independent_classical
from .graph import (
    ColorClasses,
    Graph,
    InfeasibleInstanceError,
    Partition,
    gen_bounded_degree,
    gen_clique,
    gen_clique_pair,
    gen_cycle,
    gen_matching,
    gen_star,
    greedy_color,
    random_equitable_partition,
    read_graph,
    write_graph,
)
from .oracle import Counters, OrOracle
from .quantum import (
    LearnResult,
    LevelSchedule,
    SignatureMatrix,
    find_edges,
    find_nonisolated,
    learn_bipartite_crossings,
    learn_crossings_general,
    learn_matching,
)

__version__ = "0.1.0"
