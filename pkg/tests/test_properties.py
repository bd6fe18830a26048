"""Randomized properties checked with hypothesis."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from brute import spans_edge
from orgraph.cgt import COST_MODELS, CgtInstance, CostModel, cgt_classical, cgt_quantum, cost
from orgraph.graph import Graph, greedy_color, random_equitable_partition
from orgraph.oracle import OrOracle


@st.composite
def graphs(draw, max_n: int = 16):
    n = draw(st.integers(2, max_n))
    pairs = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]),
                         max_size=3 * n))
    return Graph.from_pairs(n, {(min(e), max(e)) for e in pairs})


@given(graphs())
def test_greedy_coloring_is_proper_and_small(g):
    colors = greedy_color(range(g.n), g.edges)
    color_of = {v: i for i, cls in enumerate(colors.classes) for v in cls}
    assert sorted(color_of) == list(range(g.n))
    assert all(color_of[u] != color_of[v] for u, v in g.edges)
    assert len(colors) <= g.d_max + 1


@given(st.integers(1, 60).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n), st.integers(0, 2**32))))
def test_equitable_partition_invariants(args):
    n, T, seed = args
    parts = random_equitable_partition(range(n), T, seed).parts
    assert len(parts) == T
    assert sorted(v for p in parts for v in p) == list(range(n))
    sizes = [len(p) for p in parts]
    assert max(sizes) - min(sizes) <= 1


@given(st.sampled_from(COST_MODELS), st.fractions(Fraction(1, 10), Fraction(10)), st.integers(0, 10**6))
def test_cost_monotone_in_support(kind, scale, k):
    model = CostModel(kind, scale)
    assert 1 <= cost(model, k) <= cost(model, k + 1)


@given(graphs(), st.data())
def test_or_query_sound(g, data):
    S = data.draw(st.sets(st.integers(0, g.n - 1)))
    assert OrOracle(g).or_query(S) == spans_edge(g.edges, S)


@settings(max_examples=200)
@given(st.integers(1, 40).flatmap(lambda size: st.tuples(st.just(size), st.sets(st.integers(0, size - 1)))))
def test_cgt_recovers_exact_support(args):
    size, support = args
    hub = size
    oracle = OrOracle(Graph.from_pairs(size + 1, [(v, hub) for v in support]))
    instance = CgtInstance(range(size), frozenset({hub}))
    assert cgt_classical(instance, oracle) == support
    assert cgt_quantum(instance, oracle, CostModel()) == support
