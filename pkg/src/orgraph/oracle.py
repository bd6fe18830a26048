"""OR-query oracle over a hidden graph with classical and quantum-charged counters."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .graph import Graph

# below this size the set-based scan beats building a numpy mask
_SMALL_QUERY = 48


class Counters(NamedTuple):
    classical: int
    quantum: int


@dataclass(frozen=True)
class LogRecord:
    seq: int
    digest: str
    size: int
    answer: int
    members: tuple[int, ...] | None = None

    def line(self) -> str:
        return f"{self.seq} {self.digest} {self.size} {self.answer}"


def set_digest(vertices: np.ndarray) -> str:
    """64-bit hex digest of a sorted vertex array."""
    return hashlib.blake2b(vertices.astype("<i8").tobytes(), digest_size=8).hexdigest()


def as_vertex_array(S: Iterable[int] | np.ndarray) -> np.ndarray:
    if isinstance(S, np.ndarray):
        return S.astype(np.int64, copy=False).ravel()
    if isinstance(S, (list, tuple, range)):
        return np.array(S, dtype=np.int64).reshape(-1)
    if isinstance(S, (set, frozenset)):
        return np.fromiter(S, dtype=np.int64, count=len(S))
    return np.fromiter((int(v) for v in S), dtype=np.int64)


class OrOracle:
    """The only sanctioned access path to a hidden graph.

    ``or_query`` answers whether a vertex set spans an edge and bumps the
    classical counter.  ``ground_truth_support`` is reserved for the idealized
    quantum group-testing solver; it is free, and that solver pays through
    ``charge_quantum`` instead.
    """

    def __init__(self, hidden: Graph, *, log_enabled: bool = True, log_full_sets: bool = False):
        self._hidden = hidden
        self._adj = [frozenset(s) for s in hidden.adjacency()]
        edges = np.array(hidden.sorted_edges(), dtype=np.int64).reshape(-1, 2)
        self._eu = edges[:, 0].copy()
        self._ev = edges[:, 1].copy()
        self.classical_count = 0
        self.quantum_charged = 0
        self.log_enabled = log_enabled
        self.log_full_sets = log_full_sets
        self.log: list[LogRecord] = []

    @property
    def n(self) -> int:
        return self._hidden.n

    def _check(self, verts: np.ndarray) -> None:
        if verts.size and (verts[0] < 0 or verts[-1] >= self._hidden.n):
            raise ValueError(f"vertex id out of range 0..{self._hidden.n - 1}")

    def or_query(self, S: Iterable[int] | np.ndarray) -> int:
        verts = np.unique(as_vertex_array(S))
        self._check(verts)
        if verts.size < _SMALL_QUERY:
            members = set(verts.tolist())
            adj = self._adj
            hit = any(not adj[v].isdisjoint(members) for v in members)
        else:
            mask = np.zeros(self._hidden.n, dtype=bool)
            mask[verts] = True
            hit = bool(np.any(mask[self._eu] & mask[self._ev]))
        answer = int(hit)
        self.classical_count += 1
        if self.log_enabled:
            self.log.append(
                LogRecord(
                    self.classical_count,
                    set_digest(verts),
                    int(verts.size),
                    answer,
                    tuple(verts.tolist()) if self.log_full_sets else None,
                )
            )
        return answer

    def charge_quantum(self, q: int) -> None:
        if q < 0:
            raise ValueError("quantum charge must be non-negative")
        self.quantum_charged += int(q)

    def ground_truth_support(self, target: Iterable[int], probe: Iterable[int]) -> set[int]:
        """Vertices of ``target`` with a hidden neighbor in ``probe`` (uncharged)."""
        tset = target if isinstance(target, (set, frozenset)) else set(target)
        pset = probe if isinstance(probe, (set, frozenset)) else set(probe)
        small, big = (tset, pset) if len(tset) <= len(pset) else (pset, tset)
        if not small.isdisjoint(big):
            raise ValueError("target and probe must be disjoint")
        n = self._hidden.n
        adj = self._adj
        out: set[int] = set()
        for v in pset:
            if not 0 <= v < n:
                raise ValueError(f"vertex id {v} out of range")
            out |= adj[v] & tset
        return out

    def snapshot(self) -> Counters:
        return Counters(self.classical_count, self.quantum_charged)

    def reset_log(self) -> None:
        self.log.clear()

    def export_log(self, path: str | Path) -> None:
        Path(path).write_text("".join(rec.line() + "\n" for rec in self.log))
