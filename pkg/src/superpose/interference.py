"""Interference graphs and counting diagnostics.

Features ``i`` and ``j`` interfere when ``|C_ij| > tau`` or ``|C_ji| > tau``
for ``C = B^T A``. A graph with no independent set of size ``r`` has at
least ``m^2/(2r) - m/2`` edges (Turan applied to the complement), so some
row must carry many large off-diagonal entries. These helpers report the
raw counts; they certify nothing asymptotic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import square
from .errors import EnumerationGuardError, ParameterError

EXACT_ALPHA_MAX_M = 24


@dataclass(frozen=True)
class InterferenceGraph:
    m: int
    tau: float
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < j < self.m):
                raise ParameterError(f"edge {(i, j)} must satisfy 0 <= i < j < m")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.m)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def is_independent(self, vertices) -> bool:
        vs = sorted(set(vertices))
        return not any((a, b) in self.edges for n, a in enumerate(vs) for b in vs[n + 1 :])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def _interference_mask(C: np.ndarray, tau: float) -> np.ndarray:
    big = np.abs(C) > tau
    mask = big | big.T
    np.fill_diagonal(mask, False)
    return mask


def build_graph(C, tau: float) -> InterferenceGraph:
    """Graph on ``[m]`` joining ``i != j`` when either cross entry exceeds ``tau`` (strictly)."""
    C = square(C)
    if tau < 0:
        raise ParameterError(f"tau must be nonnegative, got {tau}")
    mask = _interference_mask(C, tau)
    ii, jj = np.nonzero(np.triu(mask, k=1))
    edges = frozenset(zip(ii.tolist(), jj.tolist()))
    return InterferenceGraph(C.shape[0], float(tau), edges)


def max_row_interferers(C, tau: float) -> tuple[int, int]:
    """Row with the most off-diagonal ``|C_ij| > tau`` and that count (ties: smallest row)."""
    C = square(C)
    big = np.abs(C) > tau
    np.fill_diagonal(big, False)
    counts = big.sum(axis=1)
    i = int(np.argmax(counts))
    return i, int(counts[i])


def turan_edge_floor(m: int, r: float) -> float:
    """``m^2 / (2r) - m/2``: edges forced in an ``m``-vertex graph with no independent ``r``-set.

    ``r`` may be fractional, as in ``r = m / (4k + 1)``.
    """
    if m < 2 or not 2 <= r <= m:
        raise ParameterError(f"need 2 <= r <= m, got r={r}, m={m}")
    return m * m / (2.0 * r) - m / 2.0


def greedy_independent_set(G: InterferenceGraph) -> frozenset[int]:
    """Maximal independent set by repeatedly taking a minimum-degree vertex.

    Degrees are recomputed in the remaining graph after each pick; ties go
    to the smallest index. The result is only a lower-bound witness for the
    independence number.
    """
    adj = G.adjacency()
    alive = set(range(G.m))
    chosen = set()
    while alive:
        v = min(alive, key=lambda u: (len(adj[u] & alive), u))
        chosen.add(v)
        alive -= adj[v] | {v}
    return frozenset(chosen)


def independence_number(G: InterferenceGraph) -> int:
    """Exact independence number by branch and bound (``m <= 24`` only)."""
    if G.m > EXACT_ALPHA_MAX_M:
        raise EnumerationGuardError(f"exact independence number limited to m <= {EXACT_ALPHA_MAX_M}, got {G.m}")
    nbr = [0] * G.m
    for i, j in G.edges:
        nbr[i] |= 1 << j
        nbr[j] |= 1 << i
    best = len(greedy_independent_set(G))

    def branch(cand: int, size: int) -> None:
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + cand.bit_count() <= best:
            return
        v = (cand & -cand).bit_length() - 1
        # either take v (dropping its neighbours) or discard it
        branch(cand & ~nbr[v] & ~(1 << v), size + 1)
        branch(cand & ~(1 << v), size)

    branch((1 << G.m) - 1, 0)
    return best
