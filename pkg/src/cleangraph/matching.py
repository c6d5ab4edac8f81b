"""Matchings in Cl2(R): the unit-block construction and an exact oracle."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, Unsupported
from .graph import CleanGraph
from .rings import FactoredRing

__all__ = [
    "MatchingResult",
    "construct_matching",
    "verify_matching",
    "matching_number_closed_form",
    "maximum_matching_oracle",
    "DEFAULT_MATCHING_BUDGET",
]

DEFAULT_MATCHING_BUDGET = 2000


@dataclass(frozen=True)
class MatchingResult:
    edges: tuple[tuple[int, int], ...]
    num_vertices: int

    @property
    def size(self) -> int:
        return len(self.edges)

    @property
    def saturated(self) -> np.ndarray:
        mask = np.zeros(self.num_vertices, dtype=bool)
        for i, j in self.edges:
            mask[i] = mask[j] = True
        return mask

    @property
    def unsaturated(self) -> list[int]:
        return np.flatnonzero(~self.saturated).tolist()

    @property
    def is_perfect(self) -> bool:
        return 2 * self.size == self.num_vertices

    def to_dict(self) -> dict:
        return {
            "size": self.size,
            "perfect": self.is_perfect,
            "edges": [list(e) for e in self.edges],
            "unsaturated": self.unsaturated,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _result(edges, n) -> MatchingResult:
    return MatchingResult(tuple(sorted((min(a, b), max(a, b)) for a, b in edges)), n)


def construct_matching(ring: FactoredRing) -> MatchingResult:
    """Matching assembled from per-unit blocks.

    Self-inverse units are coupled consecutively in table order (the identity
    first). A couple (u_i, u_j) covers its 2(2^n - 1) vertices with
    (e_2k, u_i)(e_2k+1, u_i), (e_2k-1, u_j)(e_2k, u_j),
    (e_1, u_i)(e_last, u_i) and (e_last-1, u_i)(e_last, u_j). Each inverse
    pair (u_p, u_q) contributes (e_k, u_p)(e_k, u_q) for every k. An unpaired
    self-inverse unit u gets (e_2i-1, u)(e_2i, u), leaving (e_last, u) bare.
    Idempotent subscripts above are 1-based as in the table order.
    """
    n = ring.n
    if n < 2:
        raise Unsupported(f"{ring.label} has a single local factor")
    units = ring.units
    phi = ring.phi
    top = 2**n - 1

    def vid(k, j):  # k is a 1-based idempotent position
        return (k - 1) * phi + j

    edges = []
    r = units.r
    for a in range(0, r - 1, 2):
        i, j = a, a + 1
        edges += [(vid(2 * k, i), vid(2 * k + 1, i)) for k in range(1, (top - 3) // 2 + 1)]
        edges += [(vid(2 * k - 1, j), vid(2 * k, j)) for k in range(1, (top - 1) // 2 + 1)]
        edges.append((vid(1, i), vid(top, i)))
        edges.append((vid(top - 1, i), vid(top, j)))
    if r % 2:
        u = r - 1
        edges += [(vid(2 * k - 1, u), vid(2 * k, u)) for k in range(1, (top - 1) // 2 + 1)]
    for t in range(len(units.paired)):
        p = r + 2 * t
        edges += [(vid(k, p), vid(k, p + 1)) for k in range(1, top + 1)]
    return _result(edges, ring.num_vertices)


def verify_matching(g: CleanGraph, m: MatchingResult) -> bool:
    """Every edge present in g and no vertex used twice."""
    seen = set()
    for a, b in m.edges:
        if not (0 <= a < g.num_vertices and 0 <= b < g.num_vertices):
            return False
        if a == b or a in seen or b in seen or not g.has_edge(a, b):
            return False
        seen.update((a, b))
    return True


def matching_number_closed_form(ring: FactoredRing) -> int:
    if ring.n < 2:
        raise Unsupported(f"{ring.label} has a single local factor")
    nv = (2**ring.n - 1) * ring.phi
    return nv // 2 if ring.phi % 2 == 0 else (nv - 1) // 2


def _edmonds(adj: list[list[int]], n: int) -> list[int]:
    """Maximum-cardinality matching on a general graph (Edmonds' blossoms).

    Starts from a greedy matching, then searches for an augmenting path from
    each exposed vertex once; a vertex with no augmenting path never gains one.
    """
    mate = [-1] * n
    for v in range(n):
        if mate[v] < 0:
            for w in adj[v]:
                if mate[w] < 0 and w != v:
                    mate[v], mate[w] = w, v
                    break

    def search(root):
        parent = [-1] * n
        base = list(range(n))
        used = [False] * n
        used[root] = True
        queue = deque([root])

        def lca(a, b):
            seen = [False] * n
            while True:
                a = base[a]
                seen[a] = True
                if mate[a] < 0:
                    break
                a = parent[mate[a]]
            while True:
                b = base[b]
                if seen[b]:
                    return b
                b = parent[mate[b]]

        def mark(v, b, child, blossom):
            while base[v] != b:
                blossom[base[v]] = blossom[base[mate[v]]] = True
                parent[v] = child
                child = mate[v]
                v = parent[mate[v]]

        while queue:
            v = queue.popleft()
            for to in adj[v]:
                if base[v] == base[to] or mate[v] == to:
                    continue
                if to == root or (mate[to] >= 0 and parent[mate[to]] >= 0):
                    cur = lca(v, to)
                    blossom = [False] * n
                    mark(v, cur, to, blossom)
                    mark(to, cur, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] < 0:
                    parent[to] = v
                    if mate[to] < 0:
                        return to, parent
                    used[mate[to]] = True
                    queue.append(mate[to])
        return -1, parent

    for root in range(n):
        if mate[root] >= 0:
            continue
        v, parent = search(root)
        while v >= 0:
            pv = parent[v]
            nxt = mate[pv]
            mate[v], mate[pv] = pv, v
            v = nxt
    return mate


def maximum_matching_oracle(g: CleanGraph, budget: int = DEFAULT_MATCHING_BUDGET) -> MatchingResult:
    """Exact maximum matching of g, independent of the ring structure."""
    n = g.num_vertices
    if n > budget:
        raise BudgetExceeded("maximum matching oracle", n, budget)
    adj = [g.neighbors(v).tolist() for v in range(n)]
    mate = _edmonds(adj, n)
    return _result([(v, w) for v, w in enumerate(mate) if w > v], n)
