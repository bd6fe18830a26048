import ast
import inspect

import numpy as np
import pytest

from brute import neighbors_in, spans_edge
from orgraph import classical, quantum
from orgraph.graph import Graph, gen_bounded_degree, gen_matching
from orgraph.oracle import Counters, OrOracle, set_digest


def path3() -> Graph:
    return Graph.from_pairs(3, [(0, 1), (1, 2)])


def test_or_query_examples():
    o = OrOracle(path3())
    assert o.or_query([]) == 0
    assert o.or_query([0, 2]) == 0
    assert OrOracle(Graph.from_pairs(3, [(1, 2)])).or_query({1, 2}) == 1
    assert o.classical_count == 2


def test_or_query_rejects_out_of_range():
    o = OrOracle(path3())
    with pytest.raises(ValueError):
        o.or_query([0, 3])
    with pytest.raises(ValueError):
        o.or_query([-1])


def test_or_query_matches_brute_force():
    rng = np.random.default_rng(0)
    for t in range(1000):
        n = int(rng.integers(2, 80))
        # stay below the 3-regular limit so rejection sampling never stalls
        m = int(rng.integers(0, min(6 * n // 5, n * (n - 1) // 3) + 1))
        g = gen_bounded_degree(n, m, 3, seed=t)
        o = OrOracle(g, log_enabled=False)
        S = rng.choice(n, size=int(rng.integers(0, n + 1)), replace=False)
        assert o.or_query(S.tolist()) == spans_edge(g.edges, S.tolist())
        # same answer for the array and set input paths
        assert o.or_query(S) == o.or_query(set(S.tolist()))


def test_charge_quantum_and_counters():
    o = OrOracle(path3())
    assert o.snapshot() == Counters(0, 0)
    o.charge_quantum(0)
    assert o.snapshot() == (0, 0)
    o.charge_quantum(5)
    o.or_query([0, 1])
    o.charge_quantum(5)
    assert o.snapshot() == Counters(1, 10)
    assert o.snapshot() == o.snapshot()
    with pytest.raises(ValueError):
        o.charge_quantum(-1)


def test_ground_truth_support_examples():
    # a1-b1, a2-b2 with a = 0, 1 and b = 2, 3
    o = OrOracle(Graph.from_pairs(4, [(0, 2), (1, 3)]))
    assert o.ground_truth_support({0, 1}, {2}) == {0}
    assert o.ground_truth_support({0, 1}, set()) == set()
    assert o.snapshot() == (0, 0)
    with pytest.raises(ValueError):
        o.ground_truth_support({0, 1}, {1, 2})


def test_ground_truth_support_matches_brute_force():
    rng = np.random.default_rng(1)
    for t in range(200):
        g = gen_bounded_degree(60, 70, 4, seed=t)
        o = OrOracle(g)
        perm = rng.permutation(60)
        target, probe = perm[:25].tolist(), perm[25:45].tolist()
        assert o.ground_truth_support(target, probe) == neighbors_in(g.edges, target, probe)


def test_log_records_and_export(tmp_path):
    o = OrOracle(path3(), log_full_sets=True)
    o.or_query([2, 0])
    o.or_query([1, 2])
    assert [r.line().split()[2:] for r in o.log] == [["2", "0"], ["2", "1"]]
    assert o.log[0].members == (0, 2)
    assert o.log[0].digest == set_digest(np.array([0, 2]))
    assert o.log[0].digest == set_digest(np.array([0, 2], dtype=np.int32))
    out = tmp_path / "log.txt"
    o.export_log(out)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("1 ") and lines[1].startswith("2 ")
    o.reset_log()
    assert o.log == [] and o.classical_count == 2


def test_log_disabled_and_digest_only_by_default():
    o = OrOracle(path3(), log_enabled=False)
    o.or_query([0, 1])
    assert o.log == []
    o = OrOracle(path3())
    o.or_query([0, 1])
    assert o.log[0].members is None


def test_replay_identical_log_and_counters():
    g = gen_matching(200, 60, seed=3)
    runs = []
    for _ in range(2):
        o = OrOracle(g)
        quantum.learn_matching(o, 60, seed=17, const_scale=0.1)
        runs.append(([r.line() for r in o.log], o.snapshot()))
    assert runs[0] == runs[1]
    assert runs[0][0]


def _private_oracle_access(module) -> list[str]:
    """Attribute reads like ``oracle._hidden`` on anything named like an oracle."""
    bad = []
    for node in ast.walk(ast.parse(inspect.getsource(module))):
        if isinstance(node, ast.Attribute) and node.attr.startswith("_"):
            if isinstance(node.value, ast.Name) and node.value.id in ("oracle", "o"):
                bad.append(node.attr)
    return bad


def test_learners_do_not_read_hidden_edges():
    for module in (classical, quantum):
        assert _private_oracle_access(module) == []
        src = inspect.getsource(module)
        assert "_hidden" not in src and "_adj" not in src
