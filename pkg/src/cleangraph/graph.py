"""The clean graph Cl2(R) on (nonzero idempotent, unit) pairs.

Vertex (e_i, u_j) gets id ``i * phi + j`` where i indexes the idempotent
table and j the unit table, so cell V_i (fixed idempotent) is the contiguous
id range ``[i*phi, (i+1)*phi)``. Two distinct vertices (e, u), (f, v) are
adjacent when ``e*f == 0`` or ``u*v == 1``.
"""

from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Union

import numpy as np

from . import _bfs
from .errors import BudgetExceeded, DomainError, InvalidInput, Unsupported
from .rings import FactoredRing, RingElement

__all__ = [
    "DEFAULT_VERTEX_BUDGET",
    "CleanVertex",
    "CleanGraph",
    "build_clean_graph",
    "is_adjacent",
    "bfs_distance",
    "bfs_distances",
    "closed_form_distance",
    "is_connected",
    "diameter",
    "export_graph",
    "EXPORT_FORMATS",
]

DEFAULT_VERTEX_BUDGET = 50_000
EXPORT_FORMATS = ("dot", "json", "csv-edges")

# bytes of dense boolean scratch allowed while expanding adjacency rows
_BUILD_CHUNK_BYTES = 1 << 26

if sys.byteorder != "little":  # packed rows are reinterpreted as uint64 words
    raise ImportError("cleangraph requires a little-endian host")


@dataclass(frozen=True, order=True)
class CleanVertex:
    idem_index: int
    unit_index: int


Vertex = Union[CleanVertex, int]


class CleanGraph:
    """Immutable clean graph with packed bitset adjacency rows."""

    def __init__(self, ring: FactoredRing, adj: np.ndarray):
        self.ring = ring
        self.idempotents = ring.idempotents
        self.units = ring.units
        self.phi = ring.phi
        self.num_vertices = adj.shape[0]
        adj.setflags(write=False)
        self.adj = adj

    def __repr__(self) -> str:
        return f"CleanGraph(ring={self.ring.label}, N={self.num_vertices})"

    # -- vertex handling --------------------------------------------------

    @property
    def partition_sizes(self) -> list[int]:
        return [self.phi] * len(self.idempotents)

    def cell(self, i: int) -> range:
        return range(i * self.phi, (i + 1) * self.phi)

    def vertex(self, vid: int) -> CleanVertex:
        if not 0 <= vid < self.num_vertices:
            raise InvalidInput(f"vertex id {vid} out of range [0, {self.num_vertices})")
        return CleanVertex(*divmod(vid, self.phi))

    def vertex_id(self, v: Vertex) -> int:
        if isinstance(v, CleanVertex):
            if not (0 <= v.idem_index < len(self.idempotents) and 0 <= v.unit_index < self.phi):
                raise InvalidInput(f"{v} is not a vertex of {self.ring.label}")
            return v.idem_index * self.phi + v.unit_index
        if not 0 <= v < self.num_vertices:
            raise InvalidInput(f"vertex id {v} out of range [0, {self.num_vertices})")
        return int(v)

    def vertex_of(self, e: RingElement, u: RingElement) -> CleanVertex:
        return CleanVertex(self.idempotents.index_of(e), self.units.index_of(u))

    def pair(self, v: Vertex) -> tuple[RingElement, RingElement]:
        cv = self.vertex(self.vertex_id(v))
        return self.idempotents[cv.idem_index], self.units[cv.unit_index]

    # -- adjacency ---------------------------------------------------------

    def has_edge(self, a: Vertex, b: Vertex) -> bool:
        i, j = self.vertex_id(a), self.vertex_id(b)
        return bool((int(self.adj[i, j >> 6]) >> (j & 63)) & 1)

    def _row(self, i: int) -> np.ndarray:
        bits = np.unpackbits(self.adj[i].view(np.uint8), bitorder="little")
        return bits[: self.num_vertices]

    def neighbors(self, v: Vertex) -> np.ndarray:
        return np.flatnonzero(self._row(self.vertex_id(v)))

    def degree(self, v: Vertex) -> int:
        return int(self._row(self.vertex_id(v)).sum())

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges (i, j), i < j, in ascending order."""
        for i in range(self.num_vertices):
            for j in np.flatnonzero(self._row(i)[i + 1 :]):
                yield i, i + 1 + int(j)

    @cached_property
    def num_edges(self) -> int:
        total = sum(int(np.unpackbits(row.view(np.uint8)).sum()) for row in self.adj)
        return total // 2

    # -- distances ---------------------------------------------------------

    def distance_tally(self, jobs: int = 1) -> tuple[np.ndarray, int]:
        """(counts, unreachable) over ordered pairs of distinct vertices.

        counts[d] is the number of ordered pairs at distance d. Sources are
        split into contiguous ranges when jobs > 1 and merged by summation.
        """
        cached = self.__dict__.get("_tally")
        if cached is not None:
            return cached
        n = self.num_vertices
        if jobs <= 1 or n < 2 * jobs:
            counts, unreachable = _bfs.bfs_all_sources(self.adj, n, 0, n)
        else:
            bounds = np.linspace(0, n, jobs + 1).astype(int)
            with ThreadPoolExecutor(jobs) as pool:
                parts = list(pool.map(lambda lh: _bfs.bfs_all_sources(self.adj, n, *lh), zip(bounds[:-1], bounds[1:])))
            counts = sum(p[0] for p in parts)
            unreachable = sum(int(p[1]) for p in parts)
        result = (np.asarray(counts), int(unreachable))
        self.__dict__["_tally"] = result
        return result


def _expand_rows(ring: FactoredRing) -> np.ndarray:
    idem, units = ring.idempotents, ring.units
    ni, phi = len(idem), ring.phi
    n = ni * phi
    masks = np.array(idem.masks, dtype=np.int64)
    orth = (masks[:, None] & masks[None, :]) == 0
    inv = np.zeros((phi, phi), dtype=bool)
    inv[np.arange(phi), np.array(units.inverse_index, dtype=np.int64)] = True

    nwords = (n + 63) // 64
    adj = np.zeros((n, nwords), dtype=np.uint64)
    adj_bytes = adj.view(np.uint8)
    nbytes = (n + 7) // 8
    step = max(1, min(phi, _BUILD_CHUNK_BYTES // max(n, 1)))
    for i in range(ni):
        for j0 in range(0, phi, step):
            j1 = min(phi, j0 + step)
            block = orth[i][None, :, None] | inv[j0:j1, None, :]
            block = block.reshape(j1 - j0, n)
            rows = np.arange(j0, j1)
            block[rows - j0, i * phi + rows] = False
            adj_bytes[i * phi + j0 : i * phi + j1, :nbytes] = np.packbits(block, axis=1, bitorder="little")
    return adj


def build_clean_graph(ring: FactoredRing, budget: int = DEFAULT_VERTEX_BUDGET) -> CleanGraph:
    n = ring.num_vertices
    if n > budget:
        raise BudgetExceeded(f"clean graph of {ring.label}", n, budget)
    return CleanGraph(ring, _expand_rows(ring))


def is_adjacent(g: CleanGraph, a: Vertex, b: Vertex) -> bool:
    """Evaluate the adjacency predicate in the ring itself."""
    ia, ib = g.vertex_id(a), g.vertex_id(b)
    if ia == ib:
        raise DomainError("adjacency is only defined for distinct vertices")
    e, u = g.pair(ia)
    f, v = g.pair(ib)
    return (e * f).is_zero() or (u * v).is_one()


def bfs_distances(g: CleanGraph, source: Vertex) -> np.ndarray:
    """Shortest-path lengths from source to every vertex; -1 where unreachable."""
    return _bfs.bfs_single(g.adj, g.num_vertices, g.vertex_id(source))


def bfs_distance(g: CleanGraph, a: Vertex, b: Vertex) -> float | int:
    d = int(bfs_distances(g, a)[g.vertex_id(b)])
    return math.inf if d < 0 else d


def closed_form_distance(ring: FactoredRing, a: CleanVertex, b: CleanVertex) -> int:
    """Distance read off the idempotent/unit indices without searching.

    1 if the idempotents are orthogonal or the units are mutually inverse;
    otherwise 3 when both idempotents are the identity, else 2.
    """
    if ring.n < 2:
        raise Unsupported(f"{ring.label} has a single local factor; its clean graph is disconnected")
    if a == b:
        raise DomainError("closed-form distance needs distinct vertices")
    idem, units = ring.idempotents, ring.units
    if idem.orthogonal(a.idem_index, b.idem_index) or units.inverse_index[a.unit_index] == b.unit_index:
        return 1
    if a.idem_index == b.idem_index == 0:
        return 3
    return 2


def is_connected(g: CleanGraph) -> bool:
    return bool((bfs_distances(g, 0) >= 0).all())


def diameter(g: CleanGraph, jobs: int = 1) -> float | int:
    counts, unreachable = g.distance_tally(jobs)
    if unreachable:
        return math.inf
    nz = np.flatnonzero(counts)
    return int(nz[-1]) if nz.size else 0


def export_graph(g: CleanGraph, fmt: str) -> bytes:
    if fmt == "dot":
        lines = ["graph cl2 {"]
        for vid in range(g.num_vertices):
            i, j = divmod(vid, g.phi)
            lines.append(f'  {vid} [label="e{i}_u{j}"];')
        lines += [f"  {i} -- {j};" for i, j in g.edges()]
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    if fmt == "json":
        doc = {
            "ring": g.ring.label,
            "num_vertices": g.num_vertices,
            "partition_sizes": g.partition_sizes,
            "edges": [[i, j] for i, j in g.edges()],
        }
        return (json.dumps(doc) + "\n").encode()
    if fmt == "csv-edges":
        return ("i,j\n" + "".join(f"{i},{j}\n" for i, j in g.edges())).encode()
    raise InvalidInput(f"unknown export format {fmt!r}; expected one of {', '.join(EXPORT_FORMATS)}")
