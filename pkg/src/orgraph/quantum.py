"""Quantum-query graph learners built on the idealized group-testing solver.

* ``learn_bipartite_crossings``: crossing edges between two independent sets,
  inferred from random test-set signatures.
* ``learn_crossings_general``: crossing edges between two sets whose internal
  edges are known, by covering both sides with random subsets, coloring them
  into independent classes and running the signature learner on every class
  pair.
* ``find_edges`` / ``learn_matching``: random equitable partition, classical
  learning inside parts, then pairwise merging rounds.

Random draws come from ``Generator.bit_generator.random_raw``: each 64-bit word
is split into four 16-bit lanes (low lane first) and a lane below an integer
threshold is a success, which matches Bernoulli(p) to within 2^-16.  Every
draw of ``k`` bits consumes ``ceil(k / 4)`` words, so the batched and per-call
paths consume the stream identically.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .cgt import CgtInstance, CostModel, cgt_quantum, cost
from .classical import KnownEdges, learn_all_edges_classical
from .graph import Edge, SeedLike, as_rng, log_n, norm_edge, random_equitable_partition
from .oracle import OrOracle

log = logging.getLogger(__name__)

SIGNATURE_TESTS = 60  # N = 60 d ln n test sets, p = 1/(3d)
COVER_SUBSETS = 75  # N = 75 d ln n subsets per side, p = 1/(2d)

# 16-bit lanes per chunk in the batched learner (64 MiB)
_CHUNK_LANES = 1 << 25
_LANES = 4


def sample_count(base: int, d: int, n: int, const_scale: float = 1.0) -> int:
    return max(1, math.ceil(const_scale * base * d * log_n(n)))


def bernoulli_threshold(p: Fraction) -> np.uint16:
    """Integer t with P(lane < t) = p for a uniform 16-bit lane (to 2^-16)."""
    t = math.floor(Fraction(p) * (1 << 16))
    return np.uint16(min(t, (1 << 16) - 1))


def lane_count(k: int) -> int:
    """Lanes consumed by a draw of ``k`` values (a whole number of raw words)."""
    return -(-k // _LANES) * _LANES


def raw_lanes(rng: np.random.Generator, k: int) -> np.ndarray:
    """``k`` uniform 16-bit values from ``ceil(k / 4)`` raw words."""
    words = np.asarray(rng.bit_generator.random_raw(lane_count(k) // _LANES), dtype="<u8")
    return words.view("<u2")[:k]


def draw_bits(rng: np.random.Generator, shape: tuple[int, ...], p: Fraction) -> np.ndarray:
    size = int(np.prod(shape))
    if size == 0:
        return np.zeros(shape, dtype=bool)
    return (raw_lanes(rng, size) < bernoulli_threshold(p)).reshape(shape)


@dataclass
class SignatureMatrix:
    """Per-vertex signatures over ``N`` random test sets, as Python int bitmasks.

    Bit ``i`` of ``chi_b[b]`` is set iff ``b`` is in ``tests[i]``; bit ``i`` of
    ``chi_a[a]`` is set iff ``a`` has a neighbor in ``tests[i]``.
    """

    N: int
    chi_a: dict[int, int]
    chi_b: dict[int, int]
    tests: tuple[frozenset[int], ...]

    def contained(self, a: int, b: int) -> bool:
        return self.chi_b[b] & ~self.chi_a[a] == 0

    def infer_edges(self) -> set[Edge]:
        return {norm_edge(a, b) for a in self.chi_a for b in self.chi_b if self.contained(a, b)}


@dataclass(frozen=True)
class LevelSchedule:
    T_1: int
    rounds: tuple[tuple[int, int, float, float], ...]  # (i, T_i, p_i, k_i)

    @classmethod
    def build(cls, T_1: int, m: int, n: int) -> "LevelSchedule":
        rounds = []
        T, i = T_1, 1
        while T > 1:
            p = 1.0 / T
            rounds.append((i, T, p, 2.0 * m * p * p * log_n(n)))
            T = (T + 1) // 2
            i += 1
        return cls(T_1, tuple(rounds))


@dataclass
class PhaseCost:
    name: str
    classical: int
    quantum: int


@dataclass
class CrossingStats:
    """Bookkeeping for ``learn_crossings_general`` calls."""

    calls: int = 0
    class_pairs: int = 0
    nonempty_class_pairs: int = 0
    class_overruns: int = 0


@dataclass
class LearnResult:
    edges: set[Edge]
    m: int
    d: int
    T_1: int
    const_scale: float
    phases: list[PhaseCost] = field(default_factory=list)
    levels: list[list[tuple[int, ...]]] = field(default_factory=list)
    stats: CrossingStats = field(default_factory=CrossingStats)

    @property
    def edge_count_mismatch(self) -> bool:
        return len(self.edges) != self.m


# --------------------------------------------------------------------------
# bipartite case


def find_nonisolated(
    A: Iterable[int], B: Iterable[int], oracle: OrOracle, model: CostModel
) -> tuple[set[int], set[int]]:
    A, B = frozenset(A), frozenset(B)
    a_side = cgt_quantum(CgtInstance(A, B), oracle, model)
    b_side = cgt_quantum(CgtInstance(B, A), oracle, model)
    return a_side, b_side


def build_signatures(
    A1: Iterable[int],
    B1: Iterable[int],
    d: int,
    oracle: OrOracle,
    model: CostModel,
    rng: np.random.Generator,
    const_scale: float = 1.0,
) -> SignatureMatrix:
    """Sample the test sets inside ``B1`` and learn each neighborhood in ``A1``."""
    a_list, b_list = sorted(A1), sorted(B1)
    N = sample_count(SIGNATURE_TESTS, d, oracle.n, const_scale)
    member = draw_bits(rng, (len(b_list), N), Fraction(1, 3 * d))
    tests = tuple(frozenset(b for b, row in zip(b_list, member) if row[i]) for i in range(N))
    chi_b = {b: _bits(row) for b, row in zip(b_list, member)}
    chi_a = dict.fromkeys(a_list, 0)
    ground = frozenset(a_list)
    for i, T in enumerate(tests):
        for a in cgt_quantum(CgtInstance(ground, T), oracle, model):
            chi_a[a] |= 1 << i
    return SignatureMatrix(N, chi_a, chi_b, tests)


def _bits(row: np.ndarray) -> int:
    return sum(1 << int(i) for i in np.flatnonzero(row))


def learn_bipartite_crossings(
    A: Iterable[int],
    B: Iterable[int],
    d: int,
    oracle: OrOracle,
    model: CostModel,
    seed: SeedLike = None,
    const_scale: float = 1.0,
) -> set[Edge]:
    rng = as_rng(seed)
    a1, b1 = find_nonisolated(A, B, oracle, model)
    if not a1 or not b1:
        return set()
    return build_signatures(a1, b1, d, oracle, model, rng, const_scale).infer_edges()


# --------------------------------------------------------------------------
# general case


def _color_cover(
    verts: Sequence[int], known: Iterable[Edge], member: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    index = {v: i for i, v in enumerate(verts)}
    nbrs: list[list[int]] = [[] for _ in verts]
    for u, v in known:
        iu, iv = index.get(u), index.get(v)
        if iu is not None and iv is not None:
            nbrs[iu].append(iv)
            nbrs[iv].append(iu)
    indptr = np.zeros(len(verts) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(x) for x in nbrs])
    indices = np.array([w for x in nbrs for w in x], dtype=np.int64)
    return _kernels.color_subsets(member, indptr, indices)


def _crossing_pairs(
    A: Sequence[int], B: Sequence[int], oracle: OrOracle
) -> tuple[np.ndarray, np.ndarray]:
    """Local index pairs of E(A, B), read through the group-testing channel."""
    a_index = {v: i for i, v in enumerate(A)}
    b_index = {v: i for i, v in enumerate(B)}
    b_set = frozenset(B)
    ea: list[int] = []
    eb: list[int] = []
    for a in sorted(oracle.ground_truth_support(frozenset(A), b_set)):
        for b in sorted(oracle.ground_truth_support(b_set, (a,))):
            ea.append(a_index[a])
            eb.append(b_index[b])
    return np.array(ea, dtype=np.int64), np.array(eb, dtype=np.int64)


def learn_crossings_general(
    A: Iterable[int],
    B: Iterable[int],
    known_A: KnownEdges,
    known_B: KnownEdges,
    d: int,
    oracle: OrOracle,
    model: CostModel,
    seed: SeedLike = None,
    const_scale: float = 1.0,
    *,
    stats: CrossingStats | None = None,
    batched: bool = True,
) -> set[Edge]:
    """Learn E(A, B) when the edges inside A and inside B are known.

    Every pair of color classes ``(A_{i,k}, B_{j,l})`` is handed to the
    signature learner in lexicographic ``(i, k, j, l)`` order.  With
    ``batched=True`` the class pairs that contain no crossing edge are only
    charged (they would return at once with two minimum charges and draw no
    randomness) and the rest run through a compiled kernel; ``batched=False``
    calls ``learn_bipartite_crossings`` on each class pair.  Both paths give
    identical edges, charges and random stream consumption.
    """
    rng = as_rng(seed)
    a_list, b_list = sorted(set(A)), sorted(set(B))
    stats = stats if stats is not None else CrossingStats()
    stats.calls += 1
    n = oracle.n
    N = sample_count(COVER_SUBSETS, d, n, const_scale)
    p = Fraction(1, 2 * d)
    mem_a = draw_bits(rng, (N, len(a_list)), p)
    mem_b = draw_bits(rng, (N, len(b_list)), p)
    col_a, nc_a = _color_cover(a_list, known_A.edges, mem_a)
    col_b, nc_b = _color_cover(b_list, known_B.edges, mem_b)
    target = math.ceil(log_n(n)) + 1
    overruns = int(np.count_nonzero(nc_a > target) + np.count_nonzero(nc_b > target))
    if overruns:
        log.debug("%d cover subsets needed more than %d color classes", overruns, target)
    stats.class_overruns += overruns
    total_pairs = int(nc_a.sum()) * int(nc_b.sum())
    stats.class_pairs += total_pairs

    if not batched:
        return _general_literal(a_list, b_list, col_a, nc_a, col_b, nc_b, d, oracle, model, rng,
                                const_scale, stats)

    ea, eb = _crossing_pairs(a_list, b_list, oracle)
    if ea.size == 0:
        oracle.charge_quantum(2 * total_pairs)
        return set()

    # (crossing edge, A-subset, B-subset) incidences bound every output size
    incidences = int(mem_a[:, ea].sum(axis=0) @ mem_b[:, eb].sum(axis=0))
    if incidences == 0:
        oracle.charge_quantum(2 * total_pairs)
        return set()
    a_ptr, a_ent, b_ptr, b_ent, e_ptr, e_a, e_b = _kernels.enumerate_class_pairs(
        mem_a, col_a, nc_a, mem_b, col_b, nc_b, ea, eb, incidences
    )
    n_cp = a_ptr.size - 1

    n_tests = sample_count(SIGNATURE_TESTS, d, n, const_scale)
    thr = bernoulli_threshold(Fraction(1, 3 * d))
    table = model.table(max(len(a_list), len(b_list), 1))
    inferred = np.zeros((len(a_list), len(b_list)), dtype=bool)
    charge = 2 * (total_pairs - n_cp)
    # each class pair draws a whole number of raw words, like a separate call
    draws = -(-np.diff(b_ptr) * n_tests // _LANES) * _LANES
    start = 0
    while start < n_cp:
        stop = start + 1
        budget = draws[start]
        while stop < n_cp and budget + draws[stop] <= _CHUNK_LANES:
            budget += draws[stop]
            stop += 1
        raw = raw_lanes(rng, int(budget))
        sl = slice(start, stop + 1)
        charges = _kernels.signature_batch(
            raw, thr, n_tests, a_ptr[sl], a_ent, b_ptr[sl], b_ent, e_ptr[sl], e_a, e_b,
            table, inferred,
        )
        charge += int(charges.sum())
        start = stop
    stats.nonempty_class_pairs += n_cp
    oracle.charge_quantum(charge)
    ia, ib = np.nonzero(inferred)
    return {norm_edge(a_list[x], b_list[y]) for x, y in zip(ia.tolist(), ib.tolist())}


def _general_literal(a_list, b_list, col_a, nc_a, col_b, nc_b, d, oracle, model, rng,
                     const_scale, stats) -> set[Edge]:
    a_arr, b_arr = np.asarray(a_list), np.asarray(b_list)
    a_classes = [[frozenset(a_arr[col_a[i] == k].tolist()) for k in range(nc_a[i])]
                 for i in range(len(nc_a))]
    b_classes = [[frozenset(b_arr[col_b[j] == k].tolist()) for k in range(nc_b[j])]
                 for j in range(len(nc_b))]
    edges: set[Edge] = set()
    for row in a_classes:
        for ak in row:
            for col in b_classes:
                for bl in col:
                    got = learn_bipartite_crossings(ak, bl, d, oracle, model, rng, const_scale)
                    if got:
                        stats.nonempty_class_pairs += 1
                    edges |= got
    return edges


# --------------------------------------------------------------------------
# full pipeline


def find_edges(
    oracle: OrOracle,
    m: int,
    d: int,
    model: CostModel | None = None,
    seed: SeedLike = None,
    const_scale: float = 1.0,
    *,
    T_1: int | None = None,
) -> LearnResult:
    model = model or CostModel()
    rng = as_rng(seed)
    if T_1 is None:
        T_1 = math.isqrt(m // (d + 1))
    result = LearnResult(set(), m, d, T_1, const_scale)
    n = oracle.n
    before = oracle.snapshot()

    def close_phase(name: str) -> None:
        nonlocal before
        now = oracle.snapshot()
        result.phases.append(PhaseCost(name, now.classical - before.classical,
                                       now.quantum - before.quantum))
        before = now

    if T_1 <= 1:
        result.edges = learn_all_edges_classical(range(n), oracle)
        close_phase("within")
        return result

    parts = list(random_equitable_partition(range(n), T_1, rng).parts)
    known = [KnownEdges(learn_all_edges_classical(part, oracle), frozenset(part)) for part in parts]
    result.levels.append(parts)
    close_phase("within")

    i = 1
    while len(parts) > 1:
        next_parts, next_known = [], []
        for j in range(0, len(parts) - 1, 2):
            crossing = learn_crossings_general(
                parts[j], parts[j + 1], known[j], known[j + 1], d, oracle, model, rng,
                const_scale, stats=result.stats,
            )
            next_parts.append(tuple(sorted(parts[j] + parts[j + 1])))
            next_known.append(known[j].merge(known[j + 1], crossing))
        if len(parts) % 2:
            next_parts.append(parts[-1])
            next_known.append(known[-1])
        parts, known = next_parts, next_known
        close_phase(f"round {i}")
        if len(parts) > 1:
            result.levels.append(parts)
        i += 1
    result.edges = set(known[0].edges)
    if result.edge_count_mismatch:
        log.info("learned %d edges but %d were promised", len(result.edges), m)
    return result


def learn_matching(
    oracle: OrOracle,
    m: int,
    model: CostModel | None = None,
    seed: SeedLike = None,
    const_scale: float = 1.0,
) -> LearnResult:
    return find_edges(oracle, m, 1, model, seed, const_scale, T_1=math.isqrt(m))
