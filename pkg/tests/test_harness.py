import math
from fractions import Fraction

import numpy as np
import pytest

from orgraph import harness as H
from orgraph import quantum
from orgraph.graph import Graph, InfeasibleInstanceError, random_equitable_partition
from orgraph.harness import ConfigError, TrialConfig
from orgraph.oracle import OrOracle

SMALL = Fraction(1, 20)


def test_trial_config_validation():
    with pytest.raises(ConfigError):
        TrialConfig("tree", 10)
    with pytest.raises(ConfigError):
        TrialConfig("matching", 10, 2, algorithm="grover")
    with pytest.raises(ConfigError):
        TrialConfig("matching", 10, 2, const_scale=0)
    with pytest.raises(ConfigError):
        TrialConfig("cycle", 10, 10, algorithm="learn_matching")
    assert TrialConfig("cycle", 10, d=7).degree_promise() == 2
    assert TrialConfig("matching", 10, d=7).degree_promise() == 1
    assert TrialConfig("star", 10, 3, d=3, const_scale="1/4").const_scale == Fraction(1, 4)


def test_make_graph_families():
    assert H.make_graph(TrialConfig("cycle", 12, seed=1)).m == 12
    with pytest.raises(InfeasibleInstanceError):
        H.make_graph(TrialConfig("cycle", 12, 5))
    assert H.make_graph(TrialConfig("clique", 20, 10, seed=2)).d_max == 4
    with pytest.raises(InfeasibleInstanceError):
        H.make_graph(TrialConfig("clique", 20, 11))
    g = H.make_graph(TrialConfig("regular_ish", 400, 100, 4, seed=3))
    touched = {v for e in g.edges for v in e}
    assert g.m == 100 and g.d_max <= 4
    assert len(touched) <= math.ceil(H.REGULAR_SLACK * 2 * 100 / 4)


def test_graph_and_learner_streams_differ():
    graph_ss, learner_ss = H.split_seed(5)
    assert graph_ss.generate_state(4).tolist() != learner_ss.generate_state(4).tolist()
    assert H.seed_stream(10, 3) == 13


def test_run_trial_small_matching_exact_and_replayable():
    config = TrialConfig("matching", 16, 4, algorithm="learn_matching", seed=7)
    a, b = H.run_trial(config), H.run_trial(config)
    assert a.exact and a.learned_m == 4
    assert (a.classical_queries, a.quantum_charged) == (b.classical_queries, b.quantum_charged)
    assert a.to_text() == b.to_text()


def test_classical_only_charges_nothing_quantum():
    report = H.run_trial(TrialConfig("matching", 16, 4, algorithm="classical_only", seed=7))
    assert report.exact
    assert report.quantum_charged == 0
    assert report.classical_queries > 0


@pytest.mark.parametrize("family, m, d", [("matching", 40, 1), ("bounded_degree", 60, 3), ("cycle", 0, 2)])
def test_phase_breakdown_sums_to_counters(family, m, d):
    report = H.run_trial(TrialConfig(family, 120, m, d, const_scale=SMALL, seed=4))
    assert sum(c for _, c, _ in report.phase_breakdown) == report.classical_queries
    assert sum(q for _, _, q in report.phase_breakdown) == report.quantum_charged


def test_record_is_flat_strings_and_skips_elapsed_by_default():
    report = H.run_trial(TrialConfig("star", 30, 5, 5, seed=1))
    rec = report.record()
    assert all(isinstance(v, str) for v in rec.values())
    assert "elapsed" not in rec
    assert "elapsed" in report.record(include_elapsed=True)
    assert report.to_text().splitlines()[0] == "family=star"


def test_run_learner_on_given_graph():
    g = Graph.from_pairs(10, [(0, 9), (3, 4)])
    config = TrialConfig("file", 10, 2, 1, algorithm="classical_only")
    report = H.run_learner(g, config, 0)
    assert report.exact and report.m_actual == 2


# --------------------------------------------------------------------------
# sweeps


def test_one_point_one_trial_sweep_matches_run_trial():
    config = TrialConfig("matching", 64, 16, algorithm="learn_matching", const_scale=SMALL, seed=3)
    result = H.sweep([config], 1)
    report = H.run_trial(config)
    (row,) = result.rows
    assert row["trials"] == 1 and row["infeasible"] == 0
    assert row["quantum_median"] == report.quantum_charged
    assert row["classical_max"] == report.classical_queries
    assert row["exact_rate"] == float(report.exact)
    assert result.raw[0][0].to_text() == report.to_text()


def test_sweep_median_quantum_non_decreasing_in_m():
    grid = [TrialConfig("matching", 4 * m, m, algorithm="learn_matching", const_scale=SMALL)
            for m in (64, 256, 1024)]
    rows = H.sweep(grid, 5).rows
    medians = [r["quantum_median"] for r in rows]
    assert [r["m"] for r in rows] == [64, 256, 1024]
    assert medians == sorted(medians)


def test_sweep_isolates_infeasible_point():
    grid = [
        TrialConfig("matching", 20, 4, seed=1),
        TrialConfig("matching", 5, 3, seed=1),
        TrialConfig("star", 20, 4, 4, seed=1),
    ]
    result = H.sweep(grid, 2)
    flags = [r["infeasible"] for r in result.rows]
    assert flags == [0, 1, 0]
    assert "matching" in result.rows[1]["error"]
    assert result.rows[0]["trials"] == result.rows[2]["trials"] == 2
    assert result.raw[1] == []


def test_sweep_rejects_empty_grid():
    with pytest.raises(ConfigError):
        H.sweep([], 1)
    with pytest.raises(ConfigError):
        H.sweep([TrialConfig("star", 5, 1)], 0)


def test_recomputed_rows_match_emitted_rows():
    grid = [TrialConfig("bounded_degree", 80, m, 3, const_scale=SMALL, seed=2) for m in (20, 40)]
    grid.append(TrialConfig("cycle", 80, 7))
    result = H.sweep(grid, 4)
    assert H.recompute_rows(result, grid) == result.rows
    assert H.rows_to_csv(H.recompute_rows(result, grid), H.ROW_FIELDS) == H.rows_to_csv(result.rows, H.ROW_FIELDS)


def test_sweep_same_rows_with_worker_pool():
    grid = [TrialConfig("matching", 40, 10, algorithm="learn_matching", const_scale=SMALL, seed=9)]
    serial = H.sweep(grid, 3)
    pooled = H.sweep(grid, 3, workers=2)
    assert H.rows_to_csv(serial.rows) == H.rows_to_csv(pooled.rows)
    assert H.raw_records(serial) == H.raw_records(pooled)


def test_csv_round_trip(tmp_path):
    result = H.sweep([TrialConfig("star", 30, 3, 3, seed=1)], 2)
    path = tmp_path / "rows.csv"
    H.write_csv(path, result.rows, H.ROW_FIELDS)
    back = H.read_csv(path)
    assert list(back[0]) == list(H.ROW_FIELDS)
    assert back[0]["family"] == "star" and back[0]["trials"] == "2"


# --------------------------------------------------------------------------
# fits


def test_fit_sqrt_law_exact():
    rows = [{"x": x, "y": math.sqrt(x)} for x in (4, 16, 64, 256, 1024)]
    fit = H.fit_scaling(rows, "x", "y")
    assert fit.slope == pytest.approx(0.5, abs=1e-9)
    assert fit.r2 == pytest.approx(1.0)


def test_fit_linear_law():
    rows = [{"x": x, "y": 3 * x} for x in (1, 2, 3, 10)]
    fit = H.fit_scaling(rows, "x", "y")
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3))


def test_fit_rejects_bad_input():
    with pytest.raises(ValueError):
        H.fit_scaling([{"x": 1, "y": 1}, {"x": 2, "y": 2}], "x", "y")
    with pytest.raises(ValueError):
        H.fit_scaling([{"x": 1, "y": 1}, {"x": 2, "y": 0}, {"x": 3, "y": 3}], "x", "y")
    with pytest.raises(ValueError):
        H.fit_scaling([{"x": -1, "y": 1}, {"x": 2, "y": 2}, {"x": 3, "y": 3}], "x", "y")


def test_speedup_crossover():
    def row(alg, m, c, q):
        return {"family": "matching", "n": 4 * m, "m": m, "algorithm": alg, "infeasible": 0,
                "classical_median": c, "quantum_median": q}

    rows = [row("classical_only", 64, 100, 0), row("learn_matching", 64, 0, 500),
            row("classical_only", 256, 400, 0), row("learn_matching", 256, 0, 300),
            row("classical_only", 1024, 1600, 0), row("learn_matching", 1024, 0, 700)]
    assert H.speedup_crossover(rows) == 256
    assert H.speedup_crossover(rows[:2]) is None


# --------------------------------------------------------------------------
# concentration audits


def test_audit_single_part_has_no_violations():
    summary = H.concentration_audit("matching", 10, 1, seeds=20)
    assert summary.T_1 == 1
    assert summary.part_violation_rate == summary.pair_violation_rate == 0


def test_audit_rejects_other_families():
    with pytest.raises(ConfigError):
        H.concentration_audit("cycle", 10, 10)


def test_audit_levels_counts_overflows_by_hand():
    # two parts {0..3} and {4..7}; part 0 holds 3 edges, and 2 edges cross
    g = Graph.from_pairs(8, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 5)])
    counts = H.audit_levels(g, [[(0, 1, 2, 3), (4, 5, 6, 7)]], m=5, d=1)
    # ln 8 = 2.08, so 3 inside edges overflow; k_1 = 2*5*(1/4)*ln 8 = 5.2 is not reached
    assert counts == H.AuditCounts(1, 0)


def test_merge_levels_carries_odd_part():
    levels = H.merge_levels([(0,), (1,), (2,)])
    assert levels == [[(0,), (1,), (2,)], [(0, 1), (2,)]]
    assert H.merge_levels([(0, 1)]) == []


def test_audit_partition_is_the_learners_partition():
    # the audit never runs the learner, so it must rebuild the same first partition
    m, n = 100, 400
    config = TrialConfig("matching", n, m, algorithm="learn_matching", const_scale=SMALL)
    for s in range(5):
        graph_ss, learner_ss = H.split_seed(H.seed_stream(0, s))
        graph = H.make_graph(config, graph_ss)
        result = quantum.learn_matching(OrOracle(graph), m, seed=np.random.default_rng(learner_ss),
                                        const_scale=float(SMALL))
        rng = np.random.default_rng(H.split_seed(H.seed_stream(0, s))[1])
        parts = random_equitable_partition(range(n), math.isqrt(m), rng).parts
        assert result.levels == H.merge_levels(parts)
