"""Experiment orchestration: trials, sweeps, scaling fits and concentration audits.

A trial derives two independent random streams from its seed, one for the
hidden graph and one for the learner, so that (for example) the learner's
random partition is never a replay of the generator's permutation.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .cgt import COST_MODELS, CostModel
from .classical import learn_all_edges_classical
from .graph import (
    Graph,
    InfeasibleInstanceError,
    gen_bounded_degree,
    gen_clique,
    gen_clique_pair,
    gen_cycle,
    gen_matching,
    gen_star,
    log_n,
    random_equitable_partition,
)
from .oracle import OrOracle
from .quantum import LearnResult, LevelSchedule, find_edges, learn_matching

FAMILIES = ("matching", "cycle", "bounded_degree", "star", "clique", "clique_pair", "regular_ish")
ALGORITHMS = ("find_edges", "learn_matching", "classical_only")

# regular-ish instances put m edges on about REGULAR_SLACK * 2m/d vertices
REGULAR_SLACK = Fraction(5, 4)


class ConfigError(ValueError):
    """Invalid trial or experiment configuration."""


def seed_stream(base_seed: int, trial_index: int) -> int:
    return base_seed + trial_index


def split_seed(seed: int) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
    graph_ss, learner_ss = np.random.SeedSequence(seed).spawn(2)
    return graph_ss, learner_ss


@dataclass(frozen=True)
class TrialConfig:
    family: str
    n: int
    m: int = 0
    d: int = 1
    model: CostModel = field(default_factory=CostModel)
    const_scale: Fraction = Fraction(1)
    seed: int = 0
    algorithm: str = "find_edges"

    def __post_init__(self) -> None:
        object.__setattr__(self, "const_scale", Fraction(self.const_scale))
        if self.family not in FAMILIES + ("file",):
            raise ConfigError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.n < 0 or self.m < 0 or self.d < 1:
            raise ConfigError(f"need n >= 0, m >= 0, d >= 1 (got n={self.n} m={self.m} d={self.d})")
        if self.const_scale <= 0:
            raise ConfigError("const_scale must be positive")
        if self.algorithm == "learn_matching" and self.family != "matching":
            raise ConfigError("learn_matching is only defined on the matching family")

    def with_seed(self, seed: int) -> "TrialConfig":
        return replace(self, seed=seed)

    def degree_promise(self) -> int:
        if self.family == "matching" or self.algorithm == "learn_matching":
            return 1
        if self.family == "cycle":
            return 2
        return self.d


def make_graph(config: TrialConfig, seed: np.random.SeedSequence | int | None = None) -> Graph:
    """Build the hidden graph for ``config``; raises ``InfeasibleInstanceError``."""
    n, m, d = config.n, config.m, config.d
    seed = split_seed(config.seed)[0] if seed is None else seed
    match config.family:
        case "matching":
            return gen_matching(n, m, seed)
        case "cycle":
            if m not in (0, n):
                raise InfeasibleInstanceError(f"a cycle on n={n} vertices has m=n edges, not {m}")
            return gen_cycle(n, seed)
        case "bounded_degree":
            return gen_bounded_degree(n, m, d, seed)
        case "regular_ish":
            support = min(n, math.ceil(REGULAR_SLACK * 2 * m / d))
            return gen_bounded_degree(n, m, d, seed, support=support)
        case "star":
            return gen_star(n, m, seed)
        case "clique":
            k = (1 + math.isqrt(1 + 8 * m)) // 2
            if k * (k - 1) // 2 != m:
                raise InfeasibleInstanceError(f"m={m} is not a triangular number C(k, 2)")
            return gen_clique(n, k, seed)
        case "clique_pair":
            g = gen_clique_pair(n, seed)
            if m not in (0, g.m):
                raise InfeasibleInstanceError("clique_pair fixes its own edge count; pass m=0")
            return g
    raise ConfigError(f"family {config.family!r} has no generator")


# --------------------------------------------------------------------------
# concentration audits


def part_threshold(n: int, d: int) -> float:
    """Within-part edge count treated as an overflow: ln n for matchings, (d+1) ln n otherwise."""
    return log_n(n) if d <= 1 else (d + 1) * log_n(n)


def pair_threshold(n: int, d: int, k_i: float) -> float:
    return max(k_i, (d + 1) * log_n(n))


@dataclass(frozen=True)
class AuditCounts:
    part_overflows: int = 0
    pair_overflows: int = 0


def audit_levels(graph: Graph, levels: Sequence[Sequence[Sequence[int]]], m: int, d: int) -> AuditCounts:
    """Count round-1 parts and round-i pairs whose edge counts exceed the thresholds."""
    if not levels:
        return AuditCounts()
    n = graph.n
    where = np.full(n, -1, dtype=np.int64)
    edges = np.array(graph.sorted_edges(), dtype=np.int64).reshape(-1, 2)
    schedule = LevelSchedule.build(len(levels[0]), m, n)
    part_limit = part_threshold(n, d)
    parts_over = 0
    pairs_over = 0
    for r, parts in enumerate(levels):
        for j, part in enumerate(parts):
            where[list(part)] = j
        eu, ev = where[edges[:, 0]], where[edges[:, 1]]
        if r == 0:
            inside = np.bincount(eu[eu == ev], minlength=len(parts))
            parts_over += int(np.count_nonzero(inside >= part_limit))
        k_i = schedule.rounds[r][3]
        limit = pair_threshold(n, d, k_i)
        lo, hi = np.minimum(eu, ev), np.maximum(eu, ev)
        paired = (lo % 2 == 0) & (hi == lo + 1)
        crossing = np.bincount(lo[paired] // 2, minlength=len(parts) // 2)
        pairs_over += int(np.count_nonzero(crossing >= limit))
    return AuditCounts(parts_over, pairs_over)


def merge_levels(parts: Sequence[tuple[int, ...]]) -> list[list[tuple[int, ...]]]:
    """The part lists seen by each merging round, starting from round 1."""
    levels = []
    parts = list(parts)
    while len(parts) > 1:
        levels.append(parts)
        merged = [tuple(sorted(parts[j] + parts[j + 1])) for j in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return levels


@dataclass
class AuditSummary:
    family: str
    n: int
    m: int
    d: int
    seeds: int
    T_1: int
    part_violation_rate: float
    pair_violation_rate: float
    mean_part_overflows: float
    mean_pair_overflows: float

    def row(self) -> dict[str, object]:
        return dict(self.__dict__)


def concentration_audit(family: str, n: int, m: int, d: int = 1, seeds: int = 1000,
                        base_seed: int = 0) -> AuditSummary:
    """Sample instances and the learner's partitions; report threshold violation rates.

    The partition for seed ``s`` is exactly the one ``run_trial`` would use for
    a ``find_edges`` (or ``learn_matching`` when ``family`` is matching) trial
    with that seed.
    """
    if family not in ("matching", "bounded_degree", "regular_ish"):
        raise ConfigError("concentration audits need the matching or a bounded-degree family")
    algorithm = "learn_matching" if family == "matching" else "find_edges"
    config = TrialConfig(family, n, m, d, algorithm=algorithm)
    dd = config.degree_promise()
    T_1 = math.isqrt(m) if algorithm == "learn_matching" else math.isqrt(m // (dd + 1))
    part_hits = pair_hits = 0
    part_total = pair_total = 0
    for t in range(seeds):
        graph_ss, learner_ss = split_seed(seed_stream(base_seed, t))
        graph = make_graph(config, graph_ss)
        if T_1 <= 1:
            continue
        rng = np.random.default_rng(learner_ss)
        parts = random_equitable_partition(range(n), T_1, rng).parts
        counts = audit_levels(graph, merge_levels(parts), m, dd)
        part_hits += counts.part_overflows > 0
        pair_hits += counts.pair_overflows > 0
        part_total += counts.part_overflows
        pair_total += counts.pair_overflows
    k = max(seeds, 1)
    return AuditSummary(family, n, m, dd, seeds, T_1, part_hits / k, pair_hits / k,
                        part_total / k, pair_total / k)


# --------------------------------------------------------------------------
# trials


@dataclass
class TrialReport:
    config: TrialConfig
    m_actual: int
    learned_m: int
    exact: bool
    classical_queries: int
    quantum_charged: int
    phase_breakdown: list[tuple[str, int, int]]
    part_overflows: int = 0
    pair_overflows: int = 0
    class_overruns: int = 0
    edge_count_mismatch: bool = False
    elapsed: float = 0.0

    def record(self, include_elapsed: bool = False) -> dict[str, str]:
        """Flat string record; byte-identical for identical configs unless timing is included."""
        c = self.config
        out = {
            "family": c.family,
            "algorithm": c.algorithm,
            "n": str(c.n),
            "m": str(self.m_actual),
            "d": str(c.degree_promise()),
            "cost_model": c.model.kind,
            "cost_scale": str(c.model.scale),
            "const_scale": str(c.const_scale),
            "seed": str(c.seed),
            "exact": str(int(self.exact)),
            "learned_m": str(self.learned_m),
            "edge_count_mismatch": str(int(self.edge_count_mismatch)),
            "classical_queries": str(self.classical_queries),
            "quantum_charged": str(self.quantum_charged),
            "phases": ";".join(f"{name}:{cq}/{qq}" for name, cq, qq in self.phase_breakdown),
            "part_overflows": str(self.part_overflows),
            "pair_overflows": str(self.pair_overflows),
            "class_overruns": str(self.class_overruns),
        }
        if include_elapsed:
            out["elapsed"] = f"{self.elapsed:.6f}"
        return out

    def to_text(self, include_elapsed: bool = False) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.record(include_elapsed).items())


def run_learner(graph: Graph, config: TrialConfig, learner_seed) -> TrialReport:
    """Run ``config.algorithm`` against ``graph`` and compare with the ground truth."""
    oracle = OrOracle(graph, log_enabled=False)
    scale = float(config.const_scale)
    d = config.degree_promise()
    start = time.perf_counter()
    result: LearnResult | None = None
    if config.algorithm == "classical_only":
        learned = learn_all_edges_classical(range(graph.n), oracle)
        phases = [("classical", oracle.classical_count, oracle.quantum_charged)]
    else:
        if config.algorithm == "learn_matching":
            result = learn_matching(oracle, graph.m, config.model, learner_seed, scale)
        else:
            result = find_edges(oracle, graph.m, d, config.model, learner_seed, scale)
        learned = result.edges
        phases = [(p.name, p.classical, p.quantum) for p in result.phases]
    elapsed = time.perf_counter() - start
    audit = audit_levels(graph, result.levels, graph.m, d) if result else AuditCounts()
    return TrialReport(
        config=config,
        m_actual=graph.m,
        learned_m=len(learned),
        exact=learned == graph.edges,
        classical_queries=oracle.classical_count,
        quantum_charged=oracle.quantum_charged,
        phase_breakdown=phases,
        part_overflows=audit.part_overflows,
        pair_overflows=audit.pair_overflows,
        class_overruns=result.stats.class_overruns if result else 0,
        edge_count_mismatch=len(learned) != graph.m,
        elapsed=elapsed,
    )


def run_trial(config: TrialConfig) -> TrialReport:
    graph_ss, learner_ss = split_seed(config.seed)
    graph = make_graph(config, graph_ss)
    return run_learner(graph, config, np.random.default_rng(learner_ss))


# --------------------------------------------------------------------------
# sweeps

ROW_FIELDS = (
    "family", "algorithm", "n", "m", "d", "cost_model", "cost_scale", "const_scale", "seed",
    "trials", "exact_rate",
    "classical_mean", "classical_median", "classical_max",
    "quantum_mean", "quantum_median", "quantum_max",
    "part_overflow_rate", "pair_overflow_rate", "infeasible", "error",
)


@dataclass
class SweepResult:
    rows: list[dict[str, object]]
    raw: list[list[TrialReport]]


def _aggregate(config: TrialConfig, reports: list[TrialReport]) -> dict[str, object]:
    row: dict[str, object] = {
        "family": config.family,
        "algorithm": config.algorithm,
        "n": config.n,
        "m": reports[0].m_actual if reports else config.m,
        "d": config.degree_promise(),
        "cost_model": config.model.kind,
        "cost_scale": str(config.model.scale),
        "const_scale": str(config.const_scale),
        "seed": config.seed,
        "trials": len(reports),
    }
    k = len(reports)
    row["exact_rate"] = sum(r.exact for r in reports) / k
    for key, attr in (("classical", "classical_queries"), ("quantum", "quantum_charged")):
        vals = [getattr(r, attr) for r in reports]
        row[f"{key}_mean"] = sum(vals) / k
        row[f"{key}_median"] = statistics.median(vals)
        row[f"{key}_max"] = max(vals)
    row["part_overflow_rate"] = sum(r.part_overflows > 0 for r in reports) / k
    row["pair_overflow_rate"] = sum(r.pair_overflows > 0 for r in reports) / k
    row["infeasible"] = 0
    row["error"] = ""
    return row


def _infeasible_row(config: TrialConfig, message: str) -> dict[str, object]:
    row: dict[str, object] = {name: "" for name in ROW_FIELDS}
    row.update(family=config.family, algorithm=config.algorithm, n=config.n, m=config.m,
               d=config.degree_promise(), cost_model=config.model.kind,
               cost_scale=str(config.model.scale), const_scale=str(config.const_scale),
               seed=config.seed, trials=0, infeasible=1, error=message)
    return row


def sweep(grid: Sequence[TrialConfig], trials_per_point: int = 100, *, workers: int = 1) -> SweepResult:
    """Run every grid point ``trials_per_point`` times with seeds ``seed_stream(seed, t)``.

    Rows come out in grid order and are folded in trial-index order, so the
    result does not depend on ``workers``.  A point whose instance cannot be
    generated is flagged ``infeasible`` and the others still run.
    """
    if not grid:
        raise ConfigError("empty grid")
    if trials_per_point < 1:
        raise ConfigError("trials_per_point must be positive")
    rows: list[dict[str, object]] = []
    raw: list[list[TrialReport]] = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for config in grid:
            configs = [config.with_seed(seed_stream(config.seed, t)) for t in range(trials_per_point)]
            try:
                if pool is None:
                    reports = [run_trial(c) for c in configs]
                else:
                    reports = list(pool.map(run_trial, configs))
            except InfeasibleInstanceError as exc:
                rows.append(_infeasible_row(config, str(exc)))
                raw.append([])
                continue
            rows.append(_aggregate(config, reports))
            raw.append(reports)
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepResult(rows, raw)


def recompute_rows(result: SweepResult, grid: Sequence[TrialConfig]) -> list[dict[str, object]]:
    """Aggregate again from the raw per-trial dumps (used to audit ``sweep``)."""
    return [
        _aggregate(config, reports) if reports else row
        for config, reports, row in zip(grid, result.raw, result.rows)
    ]


# --------------------------------------------------------------------------
# fits


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r2: float


def fit_scaling(rows: Iterable[dict[str, object]], x: str, y: str) -> ScalingFit:
    """Ordinary least squares of log y on log x."""
    pts = [(float(r[x]), float(r[y])) for r in rows]
    if len(pts) < 3:
        raise ValueError("need at least 3 rows to fit a scaling law")
    if any(px <= 0 or py <= 0 for px, py in pts):
        raise ValueError("scaling fits need positive x and y values")
    lx = np.log([p[0] for p in pts])
    ly = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), float(intercept), r2)


def speedup_crossover(rows: Sequence[dict[str, object]], x: str = "m") -> object | None:
    """Smallest ``x`` where the quantum median beats the classical_only median at the same point."""
    classical = {(r["family"], r["n"], r[x]): r["classical_median"]
                 for r in rows if r["algorithm"] == "classical_only" and not r["infeasible"]}
    best = None
    for r in rows:
        if r["algorithm"] == "classical_only" or r["infeasible"]:
            continue
        key = (r["family"], r["n"], r[x])
        if key in classical and float(r["quantum_median"]) < float(classical[key]):
            if best is None or float(r[x]) < float(best):
                best = r[x]
    return best


# --------------------------------------------------------------------------
# CSV


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: Sequence[dict[str, object]], fields: Sequence[str] | None = None) -> str:
    fields = list(fields or (rows[0].keys() if rows else ROW_FIELDS))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt(row.get(f, "")) for f in fields])
    return buf.getvalue()


def write_csv(path: str | Path, rows: Sequence[dict[str, object]], fields: Sequence[str] | None = None) -> None:
    Path(path).write_text(rows_to_csv(rows, fields))


def raw_records(result: SweepResult) -> list[dict[str, str]]:
    return [rep.record() for reports in result.raw for rep in reports]


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
