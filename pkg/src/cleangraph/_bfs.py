"""Compiled BFS kernels over packed adjacency rows.

Adjacency is an (N, W) uint64 array; bit t of row v (word t >> 6, bit t & 63)
is set when v ~ t. Each level picks top-down expansion (OR the frontier's
rows) or bottom-up checking (scan unvisited rows against the frontier
bitset), whichever touches fewer rows.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _bfs_into(adj, n, src, dist, frontier, nxt, fbits, acc):
    nwords = adj.shape[1]
    for v in range(n):
        dist[v] = -1
    dist[src] = 0
    frontier[0] = src
    fsize = 1
    unvisited = n - 1
    level = 0
    while fsize > 0 and unvisited > 0:
        level += 1
        nsize = 0
        if fsize <= unvisited:
            for w in range(nwords):
                acc[w] = 0
            for i in range(fsize):
                v = frontier[i]
                for w in range(nwords):
                    acc[w] |= adj[v, w]
            for t in range(n):
                if dist[t] < 0 and (acc[t >> 6] >> np.uint64(t & 63)) & np.uint64(1):
                    dist[t] = level
                    nxt[nsize] = t
                    nsize += 1
        else:
            for w in range(nwords):
                fbits[w] = 0
            for i in range(fsize):
                v = frontier[i]
                fbits[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
            for t in range(n):
                if dist[t] >= 0:
                    continue
                for w in range(nwords):
                    if adj[t, w] & fbits[w]:
                        dist[t] = level
                        nxt[nsize] = t
                        nsize += 1
                        break
        for i in range(nsize):
            frontier[i] = nxt[i]
        fsize = nsize
        unvisited -= nsize
    return level


@njit(cache=True, nogil=True)
def bfs_single(adj, n, src):
    """Distances from src; -1 marks unreachable."""
    nwords = adj.shape[1]
    dist = np.empty(n, np.int64)
    frontier = np.empty(n, np.int64)
    nxt = np.empty(n, np.int64)
    fbits = np.empty(nwords, np.uint64)
    acc = np.empty(nwords, np.uint64)
    _bfs_into(adj, n, src, dist, frontier, nxt, fbits, acc)
    return dist


@njit(cache=True, nogil=True)
def bfs_all_sources(adj, n, lo, hi):
    """Ordered-pair tally over sources lo..hi-1.

    Returns (counts, unreachable): counts[d] is the number of ordered pairs
    (s, t), s != t, at distance d.
    """
    nwords = adj.shape[1]
    counts = np.zeros(n + 1, np.int64)
    unreachable = 0
    dist = np.empty(n, np.int64)
    frontier = np.empty(n, np.int64)
    nxt = np.empty(n, np.int64)
    fbits = np.empty(nwords, np.uint64)
    acc = np.empty(nwords, np.uint64)
    for s in range(lo, hi):
        _bfs_into(adj, n, s, dist, frontier, nxt, fbits, acc)
        for t in range(n):
            d = dist[t]
            if d > 0:
                counts[d] += 1
            elif d < 0:
                unreachable += 1
    return counts, unreachable


def warm_up():
    """Compile (or load from cache) the kernels for read-only adjacency rows."""
    adj = np.zeros((2, 1), np.uint64)
    adj.setflags(write=False)
    bfs_single(adj, 2, 0)
    bfs_all_sources(adj, 2, 0, 2)
