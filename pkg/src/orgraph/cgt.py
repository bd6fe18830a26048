"""Combinatorial group testing over an OR-membership oracle.

Two solvers share one instance type: a real adaptive classical solver
(branching binary search that spends ``or_query`` calls) and an idealized
quantum solver that reads the support through the oracle's privileged channel
and charges a cost model instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .oracle import OrOracle, as_vertex_array

COST_MODELS = ("belovs", "ambainis_montanaro", "montanaro_shao")


@dataclass(frozen=True)
class CostModel:
    """Charged quantum queries for recovering a support of size ``k``.

    ``belovs`` is the tight sqrt(k) bound, ``ambainis_montanaro`` the k log k
    algorithm and ``montanaro_shao`` the explicit sqrt(k) log k log log k one.
    """

    kind: str = "belovs"
    scale: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.kind not in COST_MODELS:
            raise ValueError(f"unknown cost model {self.kind!r}; expected one of {COST_MODELS}")
        scale = Fraction(self.scale)
        if scale <= 0:
            raise ValueError("cost scale must be positive")
        object.__setattr__(self, "scale", scale)

    def table(self, kmax: int) -> np.ndarray:
        """``cost(self, k)`` for ``k = 0..kmax`` as a read-only int64 array."""
        return _cost_table(self, kmax)


@lru_cache(maxsize=64)
def _cost_table(model: CostModel, kmax: int) -> np.ndarray:
    table = np.array([cost(model, k) for k in range(kmax + 1)], dtype=np.int64)
    table.flags.writeable = False
    return table


def cost(model: CostModel, k: int) -> int:
    if k < 0:
        raise ValueError("support size must be non-negative")
    s = model.scale
    if model.kind == "belovs":
        # exact ceil(s * sqrt(k)): smallest c >= 0 with c^2 >= s^2 k
        target = s * s * k
        c = math.isqrt(math.floor(target))
        while c * c < target:
            c += 1
        return max(1, c)
    if model.kind == "ambainis_montanaro":
        x = float(s) * k * math.log2(k + 2)
    else:
        x = float(s) * math.sqrt(k) * math.log2(k + 2) * math.log2(math.log2(k + 4))
    return max(1, math.ceil(x))


@dataclass
class CgtInstance:
    """Find the members of ``ground_set`` that light up together with ``context``.

    ``membership(X)`` is ``or_query(X | context)``; it is monotone and OR-shaped
    whenever ``ground_set`` and ``context`` are disjoint independent sets.
    """

    ground_set: Sequence[int]
    context: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        self.ground_set = tuple(sorted(set(self.ground_set)))
        self.context = frozenset(self.context)
        if not self.context.isdisjoint(self.ground_set):
            raise ValueError("context must be disjoint from the ground set")
        self._context_arr = np.fromiter(self.context, dtype=np.int64, count=len(self.context))

    def membership(self, oracle: OrOracle, subset: Sequence[int]) -> int:
        if not subset:
            return 0
        return oracle.or_query(np.concatenate((as_vertex_array(subset), self._context_arr)))


def _branch(instance: CgtInstance, oracle: OrOracle, items: tuple[int, ...], out: list[int]) -> None:
    # items is known to contain at least one defective
    if len(items) == 1:
        out.append(items[0])
        return
    mid = (len(items) + 1) // 2
    left, right = items[:mid], items[mid:]
    if instance.membership(oracle, left):
        _branch(instance, oracle, left, out)
        if instance.membership(oracle, right):
            _branch(instance, oracle, right, out)
    else:
        _branch(instance, oracle, right, out)


def search_known_positive(instance: CgtInstance, oracle: OrOracle) -> set[int]:
    """Branching search when the whole ground set is already known positive."""
    out: list[int] = []
    if instance.ground_set:
        _branch(instance, oracle, instance.ground_set, out)
    return set(out)


def cgt_classical(instance: CgtInstance, oracle: OrOracle) -> set[int]:
    if not instance.ground_set or not instance.membership(oracle, instance.ground_set):
        return set()
    return search_known_positive(instance, oracle)


def cgt_quantum(instance: CgtInstance, oracle: OrOracle, model: CostModel) -> set[int]:
    support = oracle.ground_truth_support(frozenset(instance.ground_set), instance.context)
    oracle.charge_quantum(cost(model, len(support)))
    return support
