"""Shortest paths on matching graphs.

Two searches share one reusable scratch space: a plain single-source
Dijkstra, and the local variant that stops after ``m`` defects have been
examined.  Only nodes touched by a run are reset afterwards, so repeated
local searches cost time proportional to the explored region rather than
to the graph size.

The priority queue is an indexed binary heap with decrease-key, ordered by
``(distance, node id)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import GraphArrays, MatchingGraph

__all__ = [
    "DijkstraScratch",
    "DefectNeighbours",
    "PathSnapshot",
    "dijkstra_full",
    "local_dijkstra",
    "recover_path",
    "reset",
]


# ---------------------------------------------------------------------------
# compiled kernels


@njit(cache=True, inline="always")
def _less(a, b, dist):
    da = dist[a]
    db = dist[b]
    return da < db or (da == db and a < b)


@njit(cache=True)
def _sift_up(i, heap, pos, dist):
    x = heap[i]
    while i > 0:
        parent = (i - 1) >> 1
        y = heap[parent]
        if _less(x, y, dist):
            heap[i] = y
            pos[y] = i
            i = parent
        else:
            break
    heap[i] = x
    pos[x] = i


@njit(cache=True)
def _pop_min(size, heap, pos, dist):
    top = heap[0]
    pos[top] = -1
    size -= 1
    if size > 0:
        x = heap[size]
        i = 0
        while True:
            c = 2 * i + 1
            if c >= size:
                break
            if c + 1 < size and _less(heap[c + 1], heap[c], dist):
                c += 1
            if _less(heap[c], x, dist):
                heap[i] = heap[c]
                pos[heap[i]] = i
                i = c
            else:
                break
        heap[i] = x
        pos[x] = i
    return top, size


@njit(cache=True)
def _search(indptr, adj_node, adj_edge, adj_weight, source, is_defect, m, dist, pred, pred_edge,
            heap, pos, touched, out_nodes, out_dist):
    """Dijkstra from ``source``; stops once ``m`` defects were examined (m < 0: never).

    Returns ``(num_found, num_touched, num_examined)``.
    """
    ntouched = 0
    nfound = 0
    nexamined = 0
    dist[source] = 0.0
    touched[ntouched] = source
    ntouched += 1
    heap[0] = source
    pos[source] = 0
    size = 1
    while size > 0 and (m < 0 or nfound < m):
        u, size = _pop_min(size, heap, pos, dist)
        nexamined += 1
        du = dist[u]
        if m >= 0 and is_defect[u]:
            out_nodes[nfound] = u
            out_dist[nfound] = du
            nfound += 1
        for q in range(indptr[u], indptr[u + 1]):
            v = adj_node[q]
            nd = du + adj_weight[q]
            if nd < dist[v]:
                if dist[v] == np.inf:
                    touched[ntouched] = v
                    ntouched += 1
                    dist[v] = nd
                    pred[v] = u
                    pred_edge[v] = adj_edge[q]
                    heap[size] = v
                    pos[v] = size
                    size += 1
                    _sift_up(size - 1, heap, pos, dist)
                else:
                    dist[v] = nd
                    pred[v] = u
                    pred_edge[v] = adj_edge[q]
                    if pos[v] >= 0:
                        _sift_up(pos[v], heap, pos, dist)
    for i in range(size):
        pos[heap[i]] = -1
    return nfound, ntouched, nexamined


@njit(cache=True)
def _reset(touched, ntouched, dist, pred, pred_edge, pos):
    for i in range(ntouched):
        x = touched[i]
        dist[x] = np.inf
        pred[x] = x
        pred_edge[x] = -1
        pos[x] = -1


@njit(cache=True)
def _all_pairs(indptr, adj_node, adj_edge, adj_weight, n, dist_table, pred_edge_table):
    dist = np.full(n, np.inf)
    pred = np.arange(n)
    pred_edge = -np.ones(n, np.int64)
    heap = np.empty(n, np.int64)
    pos = -np.ones(n, np.int64)
    touched = np.empty(n, np.int64)
    dummy_flags = np.zeros(1, np.bool_)
    dummy_nodes = np.empty(1, np.int64)
    dummy_dist = np.empty(1, np.float64)
    for s in range(n):
        _, nt, _ = _search(indptr, adj_node, adj_edge, adj_weight, s, dummy_flags, -1, dist, pred,
                           pred_edge, heap, pos, touched, dummy_nodes, dummy_dist)
        dist_table[s, :] = dist
        for i in range(n):
            pred_edge_table[s, i] = pred_edge[i]
        _reset(touched, nt, dist, pred, pred_edge, pos)


@njit(cache=True)
def _walk(source, target, pred_edge, edge_u, edge_v, out):
    """Edges of the recorded path, from source to target; returns the count (-1 if broken)."""
    cnt = 0
    x = target
    limit = pred_edge.shape[0]
    while x != source:
        e = pred_edge[x]
        if e < 0 or cnt >= limit:
            return -1
        out[cnt] = e
        cnt += 1
        x = edge_v[e] if edge_u[e] == x else edge_u[e]
    # reverse in place
    for i in range(cnt // 2):
        t = out[i]
        out[i] = out[cnt - 1 - i]
        out[cnt - 1 - i] = t
    return cnt


# ---------------------------------------------------------------------------
# python API


class DijkstraScratch:
    """Reusable per-worker search state.

    Holds the distance, predecessor and queue-position arrays together with
    the list of nodes touched by the latest run.  ``runs``,
    ``total_touched`` and ``total_reset_work`` count activity for
    instrumentation.
    """

    def __init__(self, num_nodes: int):
        n = int(num_nodes)
        self.num_nodes = n
        self.distance = np.full(n, np.inf)
        self.predecessor = np.arange(n, dtype=np.int64)
        self.predecessor_edge = -np.ones(n, np.int64)
        self.heap = np.empty(max(n, 1), np.int64)
        self.position = -np.ones(n, np.int64)
        self.touched_buffer = np.empty(max(n, 1), np.int64)
        self.num_touched = 0
        self.source = -1
        self.runs = 0
        self.total_touched = 0
        self.total_examined = 0
        self.last_examined = 0
        self.total_reset_work = 0
        self._found_nodes = np.empty(max(n, 1), np.int64)
        self._found_dist = np.empty(max(n, 1), np.float64)

    @property
    def touched(self) -> np.ndarray:
        return self.touched_buffer[:self.num_touched]

    def reset(self) -> None:
        _reset(self.touched_buffer, self.num_touched, self.distance, self.predecessor,
               self.predecessor_edge, self.position)
        self.total_reset_work += self.num_touched
        self.num_touched = 0
        self.source = -1

    def _run(self, arrays: GraphArrays, source: int, is_defect: np.ndarray, m: int) -> int:
        if arrays.num_nodes != self.num_nodes:
            raise ValueError("scratch was allocated for a graph of a different size")
        if not 0 <= source < self.num_nodes:
            raise ValueError(f"source {source} out of range")
        if self.num_touched:
            self.reset()
        nfound, nt, nex = _search(arrays.indptr, arrays.adj_node, arrays.adj_edge,
                                  arrays.adj_weight, source, is_defect, m, self.distance,
                                  self.predecessor, self.predecessor_edge, self.heap,
                                  self.position, self.touched_buffer, self._found_nodes,
                                  self._found_dist)
        self.num_touched = nt
        self.source = source
        self.runs += 1
        self.total_touched += nt
        self.last_examined = nex
        self.total_examined += nex
        return nfound


def reset(scratch: DijkstraScratch) -> None:
    """Restore ``scratch`` to its pristine state in O(touched) time."""
    scratch.reset()


def _arrays(g) -> GraphArrays:
    return g.arrays() if isinstance(g, MatchingGraph) else g


def dijkstra_full(g, source: int, scratch: DijkstraScratch | None = None):
    """Single-source shortest paths from ``source`` to every node.

    Returns
    -------
    distances, predecessors : numpy.ndarray
        ``inf`` marks unreachable nodes; an unreachable node is its own
        predecessor.
    """
    arrays = _arrays(g)
    if scratch is None:
        scratch = DijkstraScratch(arrays.num_nodes)
    scratch._run(arrays, source, np.zeros(1, np.bool_), -1)
    return scratch.distance.copy(), scratch.predecessor.copy()


@dataclass
class PathSnapshot:
    """Predecessor edges of every node touched by one search."""

    source: int
    nodes: np.ndarray
    edges: np.ndarray

    def path_to(self, g, target: int) -> list[int]:
        arrays = _arrays(g)
        pred_edge = -np.ones(arrays.num_nodes, np.int64)
        pred_edge[self.nodes] = self.edges
        if target != self.source and pred_edge[target] < 0:
            raise KeyError(f"no path recorded to node {target}")
        out = np.empty(arrays.num_nodes, np.int64)
        cnt = _walk(self.source, target, pred_edge, arrays.edge_u, arrays.edge_v, out)
        return out[:cnt].tolist()


@dataclass
class DefectNeighbours:
    """Defects found by a local search, in examination order."""

    source: int
    defects: list[tuple[int, float]]
    snapshot: PathSnapshot

    @property
    def nodes(self) -> list[int]:
        return [d for d, _ in self.defects]


def local_dijkstra(g, syndrome, m: int, source: int,
                   scratch: DijkstraScratch | None = None) -> DefectNeighbours:
    """Find the ``m`` defects closest to ``source`` (which is itself a defect).

    The source is examined first at distance zero and fills one of the ``m``
    slots.  The search stops as soon as ``m`` defects have been examined, or
    earlier if the reachable region is exhausted.
    """
    arrays = _arrays(g)
    if m < 1:
        raise ValueError("m must be a positive integer")
    is_defect = np.asarray(syndrome).astype(np.bool_)
    if is_defect.shape != (arrays.num_nodes,):
        raise ValueError("syndrome length does not match the graph")
    if not is_defect[source]:
        raise ValueError(f"source {source} is not a defect")
    if scratch is None:
        scratch = DijkstraScratch(arrays.num_nodes)
    nfound = scratch._run(arrays, source, is_defect, int(m))
    found = [(int(scratch._found_nodes[i]), float(scratch._found_dist[i])) for i in range(nfound)]
    touched = scratch.touched.copy()
    snap = PathSnapshot(source, touched, scratch.predecessor_edge[touched].copy())
    return DefectNeighbours(source, found, snap)


def recover_path(scratch: DijkstraScratch, g, target: int) -> list[int]:
    """Edge indices of the shortest path from the last run's source to ``target``."""
    arrays = _arrays(g)
    if scratch.source < 0:
        raise KeyError("no path recorded: scratch holds no search")
    if target != scratch.source and scratch.predecessor_edge[target] < 0:
        raise KeyError(f"no path recorded to node {target}")
    out = np.empty(max(arrays.num_nodes, 1), np.int64)
    cnt = _walk(scratch.source, target, scratch.predecessor_edge, arrays.edge_u, arrays.edge_v,
                out)
    return out[:cnt].tolist()


def all_pairs(g) -> tuple[np.ndarray, np.ndarray]:
    """Distance table and predecessor-edge table between all node pairs."""
    arrays = _arrays(g)
    n = arrays.num_nodes
    dist = np.empty((n, n), np.float64)
    pred_edge = np.empty((n, n), np.int32 if len(arrays.edge_u) < 2**31 else np.int64)
    _all_pairs(arrays.indptr, arrays.adj_node, arrays.adj_edge, arrays.adj_weight, n, dist,
               pred_edge)
    return dist, pred_edge
