"""Matching graphs: construction, boundary handling and validation."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .exceptions import GraphValidationError

__all__ = [
    "Edge",
    "CheckMatrix",
    "MatchingGraph",
    "GraphArrays",
    "from_check_matrix",
    "weight_from_probability",
]


def weight_from_probability(p):
    """Log-likelihood weight ``log((1 - p) / p)`` of a fault with probability ``p``."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 0.5)):
        raise ValueError("error probabilities must lie strictly between 0 and 1/2")
    w = np.log((1 - p) / p)
    return float(w) if w.ndim == 0 else w


def _as_qubit_set(qubit_ids) -> frozenset[int]:
    if qubit_ids is None:
        return frozenset()
    if isinstance(qubit_ids, (int, np.integer)):
        return frozenset() if qubit_ids == -1 else frozenset([int(qubit_ids)])
    return frozenset(int(q) for q in qubit_ids if q != -1)


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    qubit_ids: frozenset[int]
    weight: float
    error_probability: float | None = None


@dataclass
class CheckMatrix:
    """Sparse binary check matrix as a coordinate list of nonzero ``(row, col)`` entries."""

    num_rows: int
    num_cols: int
    entries: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for r, c in self.entries:
            if not (0 <= r < self.num_rows and 0 <= c < self.num_cols):
                raise ValueError(f"entry ({r}, {c}) outside a {self.num_rows}x{self.num_cols} matrix")
            if (r, c) in seen:
                raise ValueError(f"duplicate entry ({r}, {c})")
            seen.add((r, c))

    @classmethod
    def from_array(cls, H) -> "CheckMatrix":
        if hasattr(H, "tocoo"):
            coo = H.tocoo()
            vals = np.asarray(coo.data) % 2
            keep = vals != 0
            entries = sorted(zip(coo.row[keep].tolist(), coo.col[keep].tolist()))
            return cls(coo.shape[0], coo.shape[1], entries)
        arr = np.asarray(H)
        if arr.ndim != 2:
            raise ValueError("check matrix must be two-dimensional")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("check matrix entries must be binary")
        rows, cols = np.nonzero(arr)
        return cls(arr.shape[0], arr.shape[1], list(zip(rows.tolist(), cols.tolist())))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.num_rows, self.num_cols), dtype=np.uint8)
        for r, c in self.entries:
            out[r, c] = 1
        return out


@dataclass
class GraphArrays:
    """Flat array view of a matching graph, consumed by the compiled kernels."""

    num_nodes: int
    num_qubits: int
    indptr: np.ndarray
    adj_node: np.ndarray
    adj_edge: np.ndarray
    adj_weight: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_weight: np.ndarray
    edge_probability: np.ndarray
    qubit_ptr: np.ndarray
    qubit_ids: np.ndarray
    is_boundary: np.ndarray


class MatchingGraph:
    """Weighted undirected graph of checks (nodes) and fault mechanisms (edges).

    Parameters
    ----------
    num_nodes : int, optional
        Initial node count. Adding an edge grows the node count to cover its
        endpoints.

    Examples
    --------
    >>> g = MatchingGraph()
    >>> g.add_edge(0, 1, qubit_ids={0}, weight=1.0)
    >>> g.add_edge(1, 2, qubit_ids={1, 2}, weight=0.5)
    >>> g
    <MatchingGraph with 3 nodes, 0 boundary nodes, 2 edges, 3 qubits>
    """

    def __init__(self, num_nodes: int = 0):
        self.num_nodes = int(num_nodes)
        self.num_qubits = 0
        self.edges: list[Edge] = []
        self.adjacency: list[list[int]] = [[] for _ in range(self.num_nodes)]
        self.boundary_nodes: set[int] = set()
        self._pair_index: dict[tuple[int, int], int] = {}
        self._arrays: GraphArrays | None = None

    def __repr__(self):
        return (f"<MatchingGraph with {self.num_nodes} nodes, {len(self.boundary_nodes)} boundary "
                f"nodes, {len(self.edges)} edges, {self.num_qubits} qubits>")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def _grow_nodes(self, n: int) -> None:
        if n > self.num_nodes:
            self.adjacency.extend([] for _ in range(n - self.num_nodes))
            self.num_nodes = n

    def add_edge(self, u: int, v: int, qubit_ids=None, weight: float = 1.0,
                 error_probability: float | None = None, allow_parallel: bool = False) -> None:
        """Add the fault mechanism ``(u, v)``.

        ``qubit_ids`` may be an int, a set of ints, or ``-1``/``None`` for an
        edge that toggles no qubit.  If an edge between ``u`` and ``v``
        already exists, the one with the strictly smaller weight is kept,
        unless ``allow_parallel`` is set, in which case both are stored.
        """
        u, v = int(u), int(v)
        weight = float(weight)
        if u == v:
            raise ValueError(f"self-loop on node {u}")
        if u < 0 or v < 0:
            raise ValueError("node ids must be non-negative")
        if not math.isfinite(weight) or weight < 0:
            raise ValueError(f"edge weight must be finite and non-negative, got {weight}")
        if error_probability is not None:
            error_probability = float(error_probability)
            if not 0.0 <= error_probability <= 1.0:
                raise ValueError(f"error probability {error_probability} outside [0, 1]")
        qubits = _as_qubit_set(qubit_ids)
        if any(q < 0 for q in qubits):
            raise ValueError("qubit ids must be non-negative (or -1 for none)")
        self._grow_nodes(max(u, v) + 1)
        if qubits:
            self.num_qubits = max(self.num_qubits, max(qubits) + 1)

        edge = Edge(u, v, qubits, weight, error_probability)
        key = (min(u, v), max(u, v))
        existing = self._pair_index.get(key)
        if existing is not None and not allow_parallel:
            if weight < self.edges[existing].weight:
                old = self.edges[existing]
                if (old.u, old.v) != (u, v):
                    edge = Edge(old.u, old.v, qubits, weight, error_probability)
                self.edges[existing] = edge
                self._arrays = None
            return
        if existing is None or weight < self.edges[existing].weight:
            self._pair_index[key] = len(self.edges)
        self.adjacency[u].append(len(self.edges))
        self.adjacency[v].append(len(self.edges))
        self.edges.append(edge)
        self._arrays = None

    def set_boundary(self, nodes: Iterable[int]) -> None:
        nodes = {int(x) for x in nodes}
        bad = [x for x in nodes if not 0 <= x < self.num_nodes]
        if bad:
            raise ValueError(f"boundary node ids out of range: {sorted(bad)}")
        self.boundary_nodes = nodes
        self._arrays = None

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._pair_index

    def edge_index(self, u: int, v: int) -> int:
        """Index of the lightest edge joining ``u`` and ``v``."""
        return self._pair_index[(min(u, v), max(u, v))]

    def validate(self) -> None:
        """Check every structural invariant, then join boundary nodes.

        All violations are collected and raised together.  Boundary nodes
        not already linked by a zero-weight path receive zero-weight edges
        that toggle no qubit.
        """
        problems = []
        if len(self.adjacency) != self.num_nodes:
            problems.append(f"adjacency has {len(self.adjacency)} entries for {self.num_nodes} nodes")
        expected: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for k, e in enumerate(self.edges):
            if not (0 <= e.u < self.num_nodes and 0 <= e.v < self.num_nodes):
                problems.append(f"edge {k} endpoint out of range ({e.u}, {e.v})")
                continue
            if e.u == e.v:
                problems.append(f"edge {k} is a self-loop on node {e.u}")
            if not math.isfinite(e.weight):
                problems.append(f"non-finite weight on edge {k}")
            elif e.weight < 0:
                problems.append(f"negative weight on edge {k}")
            if e.error_probability is not None and not 0.0 <= e.error_probability <= 1.0:
                problems.append(f"error probability outside [0, 1] on edge {k}")
            for q in e.qubit_ids:
                if not 0 <= q < self.num_qubits:
                    problems.append(f"qubit id {q} on edge {k} outside [0, {self.num_qubits})")
            expected[e.u].append(k)
            expected[e.v].append(k)
        if len(self.adjacency) == self.num_nodes:
            for node in range(self.num_nodes):
                if sorted(self.adjacency[node]) != expected[node]:
                    problems.append(f"adjacency of node {node} inconsistent with edge list")
        for b in sorted(self.boundary_nodes):
            if not 0 <= b < self.num_nodes:
                problems.append(f"boundary node {b} out of range")
        if problems:
            raise GraphValidationError(problems)
        self._join_boundary()

    def _join_boundary(self) -> None:
        boundary = sorted(self.boundary_nodes)
        if len(boundary) < 2:
            return
        # zero-weight connectivity among all nodes; boundary nodes in one class need nothing
        parent = list(range(self.num_nodes))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            if e.weight == 0.0:
                parent[find(e.u)] = find(e.v)
        anchor = boundary[0]
        for b in boundary[1:]:
            if find(b) != find(anchor):
                self.add_edge(anchor, b, qubit_ids=None, weight=0.0, error_probability=0.0)
                parent[find(b)] = find(anchor)

    def arrays(self) -> GraphArrays:
        """Flat CSR view of the graph (cached until the next mutation)."""
        if self._arrays is None:
            self._arrays = self._build_arrays()
        return self._arrays

    def _build_arrays(self) -> GraphArrays:
        n = self.num_nodes
        m = len(self.edges)
        eu = np.fromiter((e.u for e in self.edges), np.int64, m)
        ev = np.fromiter((e.v for e in self.edges), np.int64, m)
        ew = np.fromiter((e.weight for e in self.edges), np.float64, m)
        ep = np.fromiter((np.nan if e.error_probability is None else e.error_probability
                          for e in self.edges), np.float64, m)
        deg = np.zeros(n + 1, np.int64)
        for node in range(n):
            deg[node + 1] = len(self.adjacency[node])
        indptr = np.cumsum(deg)
        adj_edge = np.fromiter((k for node in range(n) for k in self.adjacency[node]), np.int64,
                               int(indptr[-1]))
        adj_node = np.where(eu[adj_edge] == np.repeat(np.arange(n), np.diff(indptr)),
                            ev[adj_edge], eu[adj_edge]) if m else np.empty(0, np.int64)
        qcount = np.fromiter((len(e.qubit_ids) for e in self.edges), np.int64, m)
        qptr = np.concatenate(([0], np.cumsum(qcount))).astype(np.int64)
        qids = np.fromiter((q for e in self.edges for q in sorted(e.qubit_ids)), np.int64,
                           int(qptr[-1]))
        is_boundary = np.zeros(n, dtype=np.bool_)
        if self.boundary_nodes:
            is_boundary[sorted(self.boundary_nodes)] = True
        return GraphArrays(n, self.num_qubits, indptr, adj_node.astype(np.int64), adj_edge,
                           ew[adj_edge] if m else np.empty(0), eu, ev, ew, ep, qptr, qids,
                           is_boundary)

    def check_matrix(self) -> np.ndarray:
        """Implied node-by-qubit incidence matrix over non-boundary nodes (mod 2).

        Rows are indexed by node id; boundary rows are zero.
        """
        H = np.zeros((self.num_nodes, self.num_qubits), dtype=np.uint8)
        for e in self.edges:
            for q in e.qubit_ids:
                if e.u not in self.boundary_nodes:
                    H[e.u, q] ^= 1
                if e.v not in self.boundary_nodes:
                    H[e.v, q] ^= 1
        return H

    def copy(self) -> "MatchingGraph":
        g = MatchingGraph(self.num_nodes)
        g.num_qubits = self.num_qubits
        for e in self.edges:
            g.add_edge(e.u, e.v, e.qubit_ids, e.weight, e.error_probability, allow_parallel=True)
        g.boundary_nodes = set(self.boundary_nodes)
        return g

    def same_as(self, other: "MatchingGraph") -> bool:
        """Structural equality: node count, qubit count, edge multiset and boundary set."""
        def key(e: Edge):
            return (min(e.u, e.v), max(e.u, e.v), tuple(sorted(e.qubit_ids)), e.weight,
                    -1.0 if e.error_probability is None else e.error_probability)
        return (self.num_nodes == other.num_nodes and self.num_qubits == other.num_qubits
                and self.boundary_nodes == other.boundary_nodes
                and sorted(map(key, self.edges)) == sorted(map(key, other.edges)))

    @classmethod
    def from_check_matrix(cls, H, weights=None, error_probabilities=None) -> "MatchingGraph":
        return from_check_matrix(H, weights, error_probabilities)


def from_check_matrix(H, weights=None, error_probabilities=None) -> MatchingGraph:
    """Build a matching graph from a check matrix whose columns have weight 1 or 2.

    Each column becomes one edge toggling that column's qubit.  Weight-1
    columns attach their check to a single shared boundary node appended
    after the check nodes.

    Parameters
    ----------
    H : CheckMatrix, numpy.ndarray or scipy.sparse matrix
    weights : float or array of float, optional
        Per-column weights, default 1.0.
    error_probabilities : float or array of float, optional
        Per-column fault probabilities, left unset by default.
    """
    if not isinstance(H, CheckMatrix):
        H = CheckMatrix.from_array(H)
    ncol = H.num_cols
    if weights is None:
        weights = np.ones(ncol)
    weights = np.broadcast_to(np.asarray(weights, dtype=float), (ncol,)) \
        if np.ndim(weights) == 0 else np.asarray(weights, dtype=float)
    if weights.shape != (ncol,):
        raise ValueError(f"expected {ncol} weights, got {weights.shape[0]}")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValueError("weights must be finite and non-negative")
    probs = None
    if error_probabilities is not None:
        probs = np.asarray(error_probabilities, dtype=float)
        if probs.ndim == 0:
            probs = np.full(ncol, float(probs))
        if probs.shape != (ncol,):
            raise ValueError(f"expected {ncol} error probabilities, got {probs.shape[0]}")

    rows_of: list[list[int]] = [[] for _ in range(ncol)]
    for r, c in H.entries:
        rows_of[c].append(r)
    bad = [c for c in range(ncol) if len(rows_of[c]) not in (1, 2)]
    if bad:
        c = bad[0]
        raise GraphValidationError(
            f"column {c} has weight {len(rows_of[c])}; every column must have weight 1 or 2")

    needs_boundary = any(len(r) == 1 for r in rows_of)
    g = MatchingGraph(H.num_rows + (1 if needs_boundary else 0))
    g.num_qubits = ncol
    boundary = H.num_rows
    for c in range(ncol):
        rs = sorted(rows_of[c])
        u, v = (rs[0], rs[1]) if len(rs) == 2 else (rs[0], boundary)
        g.add_edge(u, v, {c}, weights[c], None if probs is None else probs[c],
                   allow_parallel=True)
    if needs_boundary:
        g.set_boundary({boundary})
    return g
