"""Classical OR-query learners.

``learn_all_edges_classical`` is the within-part learner used by the quantum
pipeline: split by vertex id, learn both halves recursively, then recover the
edges across the halves class pair by class pair, where classes come from a
greedy coloring of the now-known half edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .cgt import CgtInstance, cgt_classical, search_known_positive
from .graph import Edge, greedy_color, norm_edge
from .oracle import OrOracle


@dataclass
class KnownEdges:
    """All hidden edges inside ``scope`` (complete by construction of the learners)."""

    edges: set[Edge] = field(default_factory=set)
    scope: frozenset[int] = field(default_factory=frozenset)

    def merge(self, other: "KnownEdges", crossing: Iterable[Edge] = ()) -> "KnownEdges":
        return KnownEdges(self.edges | other.edges | set(crossing), self.scope | other.scope)


def learn_bipartite_independent_classical(
    A: Iterable[int], B: Iterable[int], oracle: OrOracle
) -> set[Edge]:
    """Recover E(A, B) for disjoint independent A and B.

    One group test over A (context B) finds the non-isolated side; a second
    search over B per found vertex finds its neighbors.
    """
    B = tuple(sorted(set(B)))
    a_side = cgt_classical(CgtInstance(A, frozenset(B)), oracle)
    edges: set[Edge] = set()
    for a in sorted(a_side):
        for b in search_known_positive(CgtInstance(B, frozenset((a,))), oracle):
            edges.add(norm_edge(a, b))
    return edges


def learn_all_edges_classical(S: Iterable[int], oracle: OrOracle) -> set[Edge]:
    return _learn(tuple(sorted(set(S))), oracle)


def _learn(S: tuple[int, ...], oracle: OrOracle) -> set[Edge]:
    if len(S) < 2 or not oracle.or_query(S):
        return set()
    mid = (len(S) + 1) // 2
    left, right = S[:mid], S[mid:]
    e_left = _learn(left, oracle)
    e_right = _learn(right, oracle)
    edges = e_left | e_right
    right_classes = greedy_color(right, e_right).classes
    for x in greedy_color(left, e_left).classes:
        for y in right_classes:
            edges |= learn_bipartite_independent_classical(x, y, oracle)
    return edges
