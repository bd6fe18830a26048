"""Hidden ground-truth graphs, benchmark families, partitions and colorings.

Vertices are the integers ``0..n-1`` and an edge is stored as a sorted pair
``(u, v)`` with ``u < v``.  Every random operation takes an explicit seed (or a
``numpy.random.Generator``) so results are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]

SeedLike = int | np.random.Generator | np.random.SeedSequence | None


class InfeasibleInstanceError(ValueError):
    """Raised when generator parameters cannot produce the requested graph."""


class GraphFormatError(ValueError):
    """Raised by :func:`read_graph` on malformed graph files."""


def as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def norm_edge(u: int, v: int) -> Edge:
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph on ``0..n-1``."""

    n: int
    edges: frozenset[Edge]
    d_max: int = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        edges = frozenset(self.edges)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge {(u, v)} not in normal form or out of range for n={self.n}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "d_max", max(self.degrees(), default=0))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Graph":
        edges: set[Edge] = set()
        for u, v in pairs:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            e = norm_edge(u, v)
            if e in edges:
                raise ValueError(f"duplicate edge {e}")
            edges.add(e)
        return cls(n, frozenset(edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def induced_edges(self, vertices: Iterable[int]) -> set[Edge]:
        s = set(vertices)
        return {e for e in self.edges if e[0] in s and e[1] in s}

    def crossing_edges(self, a: Iterable[int], b: Iterable[int]) -> set[Edge]:
        sa, sb = set(a), set(b)
        return {
            e for e in self.edges
            if (e[0] in sa and e[1] in sb) or (e[0] in sb and e[1] in sa)
        }


@dataclass(frozen=True)
class Partition:
    parts: tuple[tuple[int, ...], ...]
    covers: bool

    def sizes(self) -> list[int]:
        return [len(p) for p in self.parts]


@dataclass(frozen=True)
class ColorClasses:
    classes: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.classes)


# --------------------------------------------------------------------------
# generators


def gen_matching(n: int, m: int, seed: SeedLike = None) -> Graph:
    if m < 0 or 2 * m > n:
        raise InfeasibleInstanceError(f"a matching with m={m} edges needs 2m <= n (n={n})")
    rng = as_rng(seed)
    chosen = rng.permutation(n)[: 2 * m]
    return Graph(n, frozenset(norm_edge(chosen[2 * i], chosen[2 * i + 1]) for i in range(m)))


def gen_cycle(n: int, seed: SeedLike = None) -> Graph:
    if n < 3:
        raise InfeasibleInstanceError(f"a Hamiltonian cycle needs n >= 3 (n={n})")
    order = as_rng(seed).permutation(n)
    return Graph(n, frozenset(norm_edge(order[i], order[(i + 1) % n]) for i in range(n)))


def gen_bounded_degree(
    n: int,
    m: int,
    d: int,
    seed: SeedLike = None,
    *,
    support: int | None = None,
    retry_budget: int | None = None,
) -> Graph:
    """Insert uniformly random pairs, rejecting those that break the degree cap.

    With ``support`` set, edges are only placed among a uniformly random subset
    of that many vertices (the rest stay isolated); this is how the
    "regular-ish" instances concentrate ``m`` edges on about ``2m/d`` vertices.
    """
    k = n if support is None else support
    if d < 0 or m < 0 or k > n or k < 0:
        raise InfeasibleInstanceError(f"bad parameters n={n} m={m} d={d} support={support}")
    if m > k * d // 2 or m > k * (k - 1) // 2:
        raise InfeasibleInstanceError(f"cannot place m={m} edges on {k} vertices with max degree {d}")
    rng = as_rng(seed)
    verts = rng.permutation(n)[:k] if support is not None else np.arange(n)
    budget = 100 * m if retry_budget is None else retry_budget
    deg = np.zeros(n, dtype=np.int64)
    edges: set[Edge] = set()
    attempts = 0
    while len(edges) < m:
        if attempts >= budget:
            raise InfeasibleInstanceError(
                f"placed only {len(edges)} of {m} edges after {attempts} attempts "
                f"(n={n}, d={d}, support={k})"
            )
        # draw in blocks; each draw counts as one attempt
        block = rng.integers(0, k, size=(min(1024, budget - attempts), 2))
        for x, y in block:
            attempts += 1
            if x == y:
                continue
            u, v = int(verts[x]), int(verts[y])
            e = norm_edge(u, v)
            if e in edges or deg[u] >= d or deg[v] >= d:
                continue
            edges.add(e)
            deg[u] += 1
            deg[v] += 1
            if len(edges) == m:
                break
    return Graph(n, frozenset(edges))


def gen_clique_pair(n: int, seed: SeedLike = None) -> Graph:
    if n < 4 or n % 2:
        raise InfeasibleInstanceError(f"clique pair needs an even n >= 4 (n={n})")
    h = n // 2
    edges = {(u, v) for u in range(h) for v in range(u + 1, h)}
    edges |= {(u, v) for u in range(h, n) for v in range(u + 1, n)}
    coins = as_rng(seed).random((h, h)) < 0.5
    edges |= {(u, h + w) for u in range(h) for w in range(h) if coins[u, w]}
    return Graph(n, frozenset(edges))


def gen_star(n: int, m: int, seed: SeedLike = None) -> Graph:
    if m < 0 or m > n - 1:
        raise InfeasibleInstanceError(f"a star with m={m} leaves needs m <= n-1 (n={n})")
    order = as_rng(seed).permutation(n)
    center = int(order[0])
    return Graph(n, frozenset(norm_edge(center, leaf) for leaf in order[1 : m + 1]))


def gen_clique(n: int, k: int, seed: SeedLike = None) -> Graph:
    if k < 0 or k > n:
        raise InfeasibleInstanceError(f"a clique on k={k} vertices needs k <= n (n={n})")
    members = sorted(int(v) for v in as_rng(seed).permutation(n)[:k])
    return Graph(n, frozenset((u, v) for i, u in enumerate(members) for v in members[i + 1 :]))


# --------------------------------------------------------------------------
# partitions and coloring


def random_equitable_partition(ground_set: Iterable[int], T: int, seed: SeedLike = None) -> Partition:
    """Shuffle the ground set and cut it into ``T`` consecutive blocks.

    Blocks are sorted internally.  The first ``|S| mod T`` blocks get the
    larger size, so the labeled partition is uniform over equitable ones.
    """
    ground = sorted(set(ground_set))
    size = len(ground)
    if not 1 <= T <= max(size, 0) or size == 0:
        raise ValueError(f"part count T={T} must lie in 1..{size}")
    order = as_rng(seed).permutation(size)
    q, r = divmod(size, T)
    parts = []
    start = 0
    for j in range(T):
        stop = start + q + (1 if j < r else 0)
        parts.append(tuple(sorted(ground[i] for i in order[start:stop])))
        start = stop
    return Partition(tuple(parts), covers=True)


def greedy_color(vertices: Iterable[int], known_edges: Iterable[Edge]) -> ColorClasses:
    """Color ``vertices`` in ascending order with the smallest free color."""
    verts = sorted(set(vertices))
    vset = set(verts)
    adj: dict[int, list[int]] = {v: [] for v in verts}
    for u, v in known_edges:
        if u in vset and v in vset:
            adj[u].append(v)
            adj[v].append(u)
    color: dict[int, int] = {}
    classes: list[list[int]] = []
    for v in verts:
        used = {color[w] for w in adj[v] if w in color}
        c = 0
        while c in used:
            c += 1
        color[v] = c
        if c == len(classes):
            classes.append([])
        classes[c].append(v)
    return ColorClasses(tuple(tuple(cl) for cl in classes))


def log_n(n: int) -> float:
    """Natural log used by every ``log n`` threshold, floored at 1 for tiny n."""
    return math.log(n) if n > math.e else 1.0


# --------------------------------------------------------------------------
# file format: header ``n m d`` then one sorted ``u v`` pair per line


def write_graph(graph: Graph, path: str | Path, d: int | None = None) -> None:
    promise = graph.d_max if d is None else d
    lines = [f"{graph.n} {graph.m} {promise}"]
    lines += [f"{u} {v}" for u, v in graph.sorted_edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_graph(text: str) -> tuple[Graph, int]:
    """Parse the line format; returns the graph and the header's degree promise."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 3:
        raise GraphFormatError("header must be 'n m d'")
    try:
        n, m, d = (int(x) for x in rows[0])
        pairs = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError as exc:
        raise GraphFormatError(f"non-integer or malformed line: {exc}") from exc
    if len(pairs) != m:
        raise GraphFormatError(f"header says m={m} but found {len(pairs)} edge lines")
    seen: set[Edge] = set()
    for u, v in pairs:
        if u == v:
            raise GraphFormatError(f"self-loop at {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex id out of range in {u} {v} (n={n})")
        e = norm_edge(u, v)
        if e in seen:
            raise GraphFormatError(f"duplicate edge {e}")
        seen.add(e)
    g = Graph(n, frozenset(seen))
    if g.d_max > d:
        raise GraphFormatError(f"max degree {g.d_max} exceeds header promise d={d}")
    return g, d


def read_graph(path: str | Path) -> tuple[Graph, int]:
    return parse_graph(Path(path).read_text())


def subset_edges(edges: Iterable[Edge], vertices: Sequence[int] | set[int]) -> set[Edge]:
    vs = vertices if isinstance(vertices, (set, frozenset)) else set(vertices)
    return {e for e in edges if e[0] in vs and e[1] in vs}
