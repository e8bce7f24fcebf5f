"""Minimum-weight perfect matching decoder.

Two modes share one pipeline (parity fix, syndrome graph, blossom matching,
path recovery):

* exact matching builds the complete syndrome graph from an all-pairs
  distance table computed once, on first use;
* local matching joins every defect only to the ``m`` defects found first by
  a local Dijkstra search (the source itself takes one of the slots), and
  raises ``m`` one step at a time while some connected component of the
  syndrome graph holds an odd number of defects, or while the blossom
  solver finds no perfect matching.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import blossom
from .exceptions import DecodeError, InfeasibleMatchingError
from .graph import MatchingGraph
from .paths import DijkstraScratch, _reset, _search, all_pairs

__all__ = ["Decoder", "DecodeResult", "SyndromeGraph", "DEFAULT_NUM_NEIGHBOURS"]

DEFAULT_NUM_NEIGHBOURS = 30
DEFAULT_MAX_EXACT_NODES = 10_000
_UNSET = object()


@njit(cache=True)
def _grow(arr, need):
    out = np.empty(max(2 * arr.shape[0], need), arr.dtype)
    out[:arr.shape[0]] = arr
    return out


@njit(cache=True)
def _build_local(indptr, adj_node, adj_edge, adj_weight, is_defect, defects, m, node_index,
                 dist, pred, pred_edge, heap, pos, touched, found_nodes, found_dist):
    k = defects.shape[0]
    ci = np.empty(max(16, k * max(m - 1, 1)), np.int64)
    cj = np.empty_like(ci)
    cw = np.empty(ci.shape[0], np.float64)
    ne = 0
    snap_ptr = np.zeros(k + 1, np.int64)
    snap_nodes = np.empty(max(64, 4 * k * m), np.int64)
    snap_edges = np.empty_like(snap_nodes)
    ns = 0
    total_touched = 0
    for i in range(k):
        src = defects[i]
        nfound, nt, _ = _search(indptr, adj_node, adj_edge, adj_weight, src, is_defect, m, dist,
                                pred, pred_edge, heap, pos, touched, found_nodes, found_dist)
        if ns + nt > snap_nodes.shape[0]:
            snap_nodes = _grow(snap_nodes, ns + nt)
            snap_edges = _grow(snap_edges, ns + nt)
        for t in range(nt):
            x = touched[t]
            snap_nodes[ns] = x
            snap_edges[ns] = pred_edge[x]
            ns += 1
        snap_ptr[i + 1] = ns
        if ne + nfound > ci.shape[0]:
            ci = _grow(ci, ne + nfound)
            cj = _grow(cj, ne + nfound)
            cw = _grow(cw, ne + nfound)
        for f in range(nfound):
            x = found_nodes[f]
            if x == src:
                continue
            ci[ne] = i
            cj[ne] = node_index[x]
            cw[ne] = found_dist[f]
            ne += 1
        total_touched += nt
        _reset(touched, nt, dist, pred, pred_edge, pos)

    keys = np.empty(ne, np.int64)
    for e in range(ne):
        a = ci[e]
        b = cj[e]
        keys[e] = min(a, b) * k + max(a, b)
    order = np.argsort(keys, kind="mergesort")
    eu = np.empty(ne, np.int64)
    ev = np.empty(ne, np.int64)
    ew = np.empty(ne, np.float64)
    esrc = np.empty(ne, np.int64)
    kept = 0
    last = -1
    for r in range(ne):
        e = order[r]
        if keys[e] == last:
            continue
        last = keys[e]
        eu[kept] = min(ci[e], cj[e])
        ev[kept] = max(ci[e], cj[e])
        ew[kept] = cw[e]
        esrc[kept] = ci[e]
        kept += 1
    return (eu[:kept], ev[:kept], ew[:kept], esrc[:kept], snap_ptr, snap_nodes[:ns],
            snap_edges[:ns], total_touched)


@njit(cache=True)
def _toggle_path(source, target, pred_edge, edge_u, edge_v, qptr, qids, correction, edge_flips):
    x = target
    while x != source:
        e = pred_edge[x]
        edge_flips[e] ^= 1
        for q in range(qptr[e], qptr[e + 1]):
            correction[qids[q]] ^= 1
        x = edge_v[e] if edge_u[e] == x else edge_u[e]


@njit(cache=True)
def _local_correction(src_idx, targets, defects, snap_ptr, snap_nodes, snap_edges, work,
                      edge_u, edge_v, qptr, qids, correction, edge_flips):
    for p in range(src_idx.shape[0]):
        i = src_idx[p]
        for t in range(snap_ptr[i], snap_ptr[i + 1]):
            work[snap_nodes[t]] = snap_edges[t]
        _toggle_path(defects[i], targets[p], work, edge_u, edge_v, qptr, qids, correction,
                     edge_flips)
        for t in range(snap_ptr[i], snap_ptr[i + 1]):
            work[snap_nodes[t]] = -1


@njit(cache=True)
def _exact_correction(sources, targets, pred_table, edge_u, edge_v, qptr, qids, correction,
                      edge_flips):
    for p in range(sources.shape[0]):
        _toggle_path(sources[p], targets[p], pred_table[sources[p]], edge_u, edge_v, qptr, qids,
                     correction, edge_flips)


@dataclass
class SyndromeGraph:
    """Graph over defects whose edge weights are shortest-path distances in the matching graph.

    ``edge_u``/``edge_v`` index into ``defects``.  In local mode
    ``edge_source`` names the defect whose search recorded the path, and the
    ``snapshot_*`` arrays hold every search's predecessor edges.
    """

    defects: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    weights: np.ndarray
    mode: str
    num_neighbours: int | None = None
    edge_source: np.ndarray | None = None
    snapshot_ptr: np.ndarray | None = None
    snapshot_nodes: np.ndarray | None = None
    snapshot_edges: np.ndarray | None = None
    touched: int = 0

    @property
    def num_vertices(self) -> int:
        return int(self.defects.shape[0])

    def to_weighted_graph(self) -> blossom.WeightedGraph:
        return blossom.WeightedGraph(self.num_vertices, list(zip(
            self.edge_u.tolist(), self.edge_v.tolist(), self.weights.tolist())))

    def odd_components(self) -> int:
        """Number of connected components holding an odd number of defects."""
        k = self.num_vertices
        if k == 0:
            return 0
        adj = coo_matrix((np.ones(self.edge_u.size), (self.edge_u, self.edge_v)), shape=(k, k))
        _, labels = connected_components(adj, directed=False)
        return int(np.count_nonzero(np.bincount(labels) % 2))


@dataclass
class DecodeResult:
    correction: np.ndarray
    weight: float
    pairs: list[tuple[int, int]]
    num_neighbours: int | None
    escalations: int
    edge_flips: np.ndarray


class Decoder:
    """Decoder state for one matching graph.

    Parameters
    ----------
    graph : MatchingGraph
        Validated in place on construction.
    num_neighbours : int or None, optional
        Default ``m`` for local matching; ``None`` (or ``"all"``) selects
        exact matching. Default 30.
    max_exact_nodes : int, optional
        Exact mode stores O(N^2) distance and predecessor tables and refuses
        graphs with more nodes than this.

    Notes
    -----
    The graph and the all-pairs tables are shared read-only between
    ``worker()`` views; each view owns its own search scratch, so use one
    view per thread.
    """

    def __init__(self, graph: MatchingGraph, num_neighbours=DEFAULT_NUM_NEIGHBOURS,
                 max_exact_nodes: int = DEFAULT_MAX_EXACT_NODES, _shared=None):
        if _shared is None:
            graph.validate()
            _shared = {"lock": threading.Lock(), "tables": None}
        self.graph = graph
        self.arrays = graph.arrays()
        self.num_neighbours = _normalise_m(num_neighbours)
        self.max_exact_nodes = int(max_exact_nodes)
        self._shared = _shared
        n = self.arrays.num_nodes
        self.scratch = DijkstraScratch(n)
        self._work = -np.ones(n, np.int64)
        self._boundary = np.flatnonzero(self.arrays.is_boundary)
        self._checks = np.flatnonzero(~self.arrays.is_boundary)
        self.escalations = 0
        self.decodes = 0

    def worker(self) -> "Decoder":
        """A view sharing graph and tables but owning fresh scratch space."""
        return Decoder(self.graph, self.num_neighbours, self.max_exact_nodes, self._shared)

    # --- exact-mode tables -------------------------------------------------

    @property
    def tables_built(self) -> bool:
        return self._shared["tables"] is not None

    def precompute_all_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Build (once) and return the all-pairs distance and predecessor-edge tables."""
        tables = self._shared["tables"]
        if tables is None:
            with self._shared["lock"]:
                tables = self._shared["tables"]
                if tables is None:
                    if self.arrays.num_nodes > self.max_exact_nodes:
                        raise DecodeError(
                            f"exact matching needs O(N^2) memory; graph has {self.arrays.num_nodes} "
                            f"nodes (limit {self.max_exact_nodes}); use local matching instead")
                    tables = all_pairs(self.arrays)
                    for t in tables:
                        t.setflags(write=False)
                    self._shared["tables"] = tables
        return tables

    # --- pipeline stages ----------------------------------------------------

    def fix_parity(self, syndrome) -> np.ndarray:
        """Copy of the syndrome with even defect parity.

        The input holds one bit per node, or one bit per non-boundary node
        in increasing id order.  Boundary positions are cleared and, if the
        count is odd, the lowest-id boundary node is flipped.
        """
        s = np.asarray(syndrome).ravel()
        n = self.arrays.num_nodes
        if s.size == self._checks.size and s.size != n:
            # one bit per check, boundary nodes omitted
            full = np.zeros(n, np.uint8)
            full[self._checks] = s != 0
            s = full
        elif s.size != n:
            raise ValueError(f"syndrome has length {s.size}; expected {n} (all nodes) or "
                             f"{self._checks.size} (non-boundary nodes)")
        s = (s != 0).astype(np.uint8)
        if self._boundary.size:
            s[self._boundary] = 0
        if int(s.sum()) % 2:
            if not self._boundary.size:
                raise DecodeError("odd syndrome without boundary")
            s[self._boundary[0]] = 1
        return s

    def build_syndrome_graph_exact(self, defects) -> SyndromeGraph:
        dist, _ = self.precompute_all_pairs()
        defects = np.asarray(defects, np.int64)
        k = defects.size
        iu, iv = np.triu_indices(k, 1)
        w = dist[defects[iu], defects[iv]]
        ok = np.isfinite(w)
        return SyndromeGraph(defects, iu[ok].astype(np.int64), iv[ok].astype(np.int64), w[ok],
                             "exact")

    def build_syndrome_graph_local(self, syndrome, m: int) -> SyndromeGraph:
        s = np.asarray(syndrome)
        defects = np.flatnonzero(s).astype(np.int64)
        m = min(int(m), max(defects.size, 1))
        if m < 1:
            raise ValueError("num_neighbours must be positive")
        a = self.arrays
        sc = self.scratch
        if sc.num_touched:
            sc.reset()
        node_index = -np.ones(a.num_nodes, np.int64)
        node_index[defects] = np.arange(defects.size)
        eu, ev, ew, esrc, sptr, snodes, sedges, touched = _build_local(
            a.indptr, a.adj_node, a.adj_edge, a.adj_weight, s.astype(np.bool_), defects, m,
            node_index, sc.distance, sc.predecessor, sc.predecessor_edge, sc.heap, sc.position,
            sc.touched_buffer, sc._found_nodes, sc._found_dist)
        sc.runs += defects.size
        sc.total_touched += touched
        sc.total_reset_work += touched
        return SyndromeGraph(defects, eu, ev, ew, "local", m, esrc, sptr, snodes, sedges, touched)

    def ensure_connected(self, syndrome, m: int) -> tuple[SyndromeGraph, int]:
        """Smallest ``m' >= m`` whose syndrome graph has no odd-parity component."""
        k = int(np.count_nonzero(syndrome))
        m = min(int(m), max(k, 1))
        while True:
            sg = self.build_syndrome_graph_local(syndrome, m)
            if sg.odd_components() == 0:
                return sg, m
            if m >= k:
                raise DecodeError("odd-parity component: the matching graph has a connected "
                                  "component with an odd number of defects")
            m += 1
            self.escalations += 1

    def matching_to_correction(self, mate_edge: np.ndarray, sg: SyndromeGraph,
                               mate: np.ndarray | None = None):
        """XOR the qubits of every edge on each matched pair's shortest path.

        ``mate_edge[i]`` is the syndrome-graph edge matching defect ``i``.
        Returns ``(correction, edge_flips)``.
        """
        a = self.arrays
        correction = np.zeros(a.num_qubits, np.uint8)
        edge_flips = np.zeros(a.edge_u.size, np.uint8)
        k = sg.num_vertices
        if k == 0:
            return correction, edge_flips
        used = np.unique(mate_edge)
        if sg.mode == "exact":
            _, pred = self.precompute_all_pairs()
            _exact_correction(sg.defects[sg.edge_u[used]], sg.defects[sg.edge_v[used]], pred,
                              a.edge_u, a.edge_v, a.qubit_ptr, a.qubit_ids, correction, edge_flips)
        else:
            src = sg.edge_source[used]
            other = np.where(sg.edge_u[used] == src, sg.edge_v[used], sg.edge_u[used])
            _local_correction(src, sg.defects[other], sg.defects, sg.snapshot_ptr,
                              sg.snapshot_nodes, sg.snapshot_edges, self._work, a.edge_u,
                              a.edge_v, a.qubit_ptr, a.qubit_ids, correction, edge_flips)
        return correction, edge_flips

    # --- entry points ---------------------------------------------------------

    def decode_detailed(self, syndrome, num_neighbours=_UNSET) -> DecodeResult:
        m = self.num_neighbours if num_neighbours is _UNSET else _normalise_m(num_neighbours)
        s = self.fix_parity(syndrome)
        self.decodes += 1
        escalations = self.escalations
        if m is None:
            sg = self.build_syndrome_graph_exact(np.flatnonzero(s))
            used_m = None
            mate, mate_edge, total = self._match(sg)
        else:
            k = int(np.count_nonzero(s))
            used_m = m
            while True:
                sg, used_m = self.ensure_connected(s, used_m)
                try:
                    mate, mate_edge, total = self._match(sg)
                    break
                except DecodeError:
                    # even components can still lack a perfect matching (a star, say)
                    if used_m >= k:
                        raise
                    used_m += 1
                    self.escalations += 1
        correction, flips = self.matching_to_correction(mate_edge, sg, mate)
        lo = np.flatnonzero(np.arange(sg.num_vertices) < mate)
        pairs = list(zip(sg.defects[lo].tolist(), sg.defects[mate[lo]].tolist()))
        return DecodeResult(correction, total, pairs, used_m, self.escalations - escalations, flips)

    def _match(self, sg: SyndromeGraph):
        try:
            mate, mate_edge, total, _ = blossom.solve_arrays(sg.num_vertices, sg.edge_u, sg.edge_v,
                                                             sg.weights)
        except InfeasibleMatchingError as exc:
            raise DecodeError("odd-parity component: no perfect matching of the defects "
                              "exists") from exc
        return mate, mate_edge, total

    def decode(self, syndrome, num_neighbours=_UNSET, return_weight: bool = False):
        """Decode a binary syndrome over all graph nodes into a qubit correction.

        Parameters
        ----------
        syndrome : array_like
            One entry per node (boundary entries are ignored), or one entry
            per non-boundary node.
        num_neighbours : int, None or "all", optional
            Overrides the decoder's default ``m``; ``None``/``"all"`` runs
            exact matching.
        return_weight : bool, optional
            Also return the total weight of the matching.
        """
        r = self.decode_detailed(syndrome, num_neighbours)
        return (r.correction, r.weight) if return_weight else r.correction


def _normalise_m(m):
    if m is None or (isinstance(m, str) and m.lower() == "all"):
        return None
    m = int(m)
    if m < 1:
        raise ValueError("num_neighbours must be a positive integer, None or 'all'")
    return m
