"""Built-in codes and stochastic noise.

Every generator returns a :class:`CodeInstance` holding the matching graph
and two families of qubit sets:

``logical_masks``
    Sets used to score a decode.  Each crosses every logical operator of
    one class an odd number of times while meeting every trivial cycle an
    even number of times, so the parity of the residual error over a mask is
    1 exactly when the residual belongs to a nontrivial class.
``logical_operators``
    Representatives of the nontrivial classes themselves.  They lie in the
    kernel of the check matrix, so they leave no syndrome.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .graph import MatchingGraph, from_check_matrix, weight_from_probability

__all__ = [
    "CodeInstance",
    "NoiseSample",
    "repetition_code",
    "toric_2d",
    "toric_3d_phenomenological",
    "sample_noise",
    "logical_failure",
]


@dataclass
class CodeInstance:
    graph: MatchingGraph
    logical_masks: list[np.ndarray]
    logical_operators: list[np.ndarray]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.graph.validate()
        self._H = None
        self._masks = None

    @property
    def num_qubits(self) -> int:
        return self.graph.num_qubits

    def check_matrix(self) -> sparse.csr_matrix:
        """Node-by-qubit incidence over non-boundary nodes, as a sparse integer matrix."""
        if self._H is None:
            a = self.graph.arrays()
            counts = np.diff(a.qubit_ptr)
            owner = np.repeat(np.arange(a.edge_u.size), counts)
            rows = np.concatenate((a.edge_u[owner], a.edge_v[owner]))
            cols = np.concatenate((a.qubit_ids, a.qubit_ids))
            keep = ~a.is_boundary[rows]
            H = sparse.coo_matrix((np.ones(int(keep.sum()), np.int64), (rows[keep], cols[keep])),
                                  shape=(a.num_nodes, a.num_qubits)).tocsr()
            H.data %= 2
            H.eliminate_zeros()
            self._H = H
        return self._H

    def syndrome_of(self, error) -> np.ndarray:
        """``H @ error`` mod 2 as a uint8 vector over nodes."""
        return ((self.check_matrix() @ np.asarray(error, np.int64)) % 2).astype(np.uint8)

    def mask_matrix(self) -> sparse.csr_matrix:
        if self._masks is None:
            rows = np.concatenate([np.full(len(m), i) for i, m in enumerate(self.logical_masks)]
                                  or [np.empty(0, np.int64)])
            cols = np.concatenate([np.asarray(m, np.int64) for m in self.logical_masks]
                                  or [np.empty(0, np.int64)])
            self._masks = sparse.csr_matrix((np.ones(rows.size, np.int64), (rows, cols)),
                                            shape=(len(self.logical_masks), self.num_qubits))
        return self._masks


@dataclass
class NoiseSample:
    noise: np.ndarray
    syndrome: np.ndarray
    flipped_edges: np.ndarray


def _check_p(name, p, upper=0.5):
    if not 0.0 < p < upper:
        raise ValueError(f"{name} must lie strictly between 0 and {upper}, got {p}")


def repetition_code(n: int, p: float) -> CodeInstance:
    """Length-``n`` repetition code with a shared boundary node at both ends."""
    if n < 2:
        raise ValueError("repetition code needs n >= 2")
    _check_p("p", p)
    H = np.zeros((n - 1, n), np.uint8)
    idx = np.arange(n - 1)
    H[idx, idx] = 1
    H[idx, idx + 1] = 1
    g = from_check_matrix(H, weights=weight_from_probability(p), error_probabilities=p)
    return CodeInstance(g, [np.array([0])], [np.arange(n)],
                        {"code": "rep", "L": n, "T": 1, "p": p, "q": None})


def _toric_edges(L: int):
    """Horizontal then vertical edge endpoints of the periodic ``L`` x ``L`` lattice."""
    x, y = np.meshgrid(np.arange(L), np.arange(L), indexing="xy")
    x = x.ravel()
    y = y.ravel()
    here = x + L * y
    right = (x + 1) % L + L * y
    up = x + L * ((y + 1) % L)
    return np.concatenate((here, here)), np.concatenate((right, up))


def _toric_logicals(L: int, offset: int = 0):
    # qubit x + L*y is horizontal edge h(x, y); L*L + x + L*y is vertical edge v(x, y)
    ar = np.arange(L)
    masks = [offset + L * ar, offset + L * L + ar]
    operators = [offset + ar, offset + L * L + L * ar]
    return masks, operators


def toric_2d(L: int, p: float) -> CodeInstance:
    """Toric code on an ``L`` x ``L`` periodic lattice under independent bit flips.

    Node ``x + L*y`` is the check at ``(x, y)``.  Qubit ``x + L*y`` joins it to
    its right neighbour and qubit ``L*L + x + L*y`` to its upper neighbour.
    """
    if L < 2:
        raise ValueError("toric code needs L >= 2")
    _check_p("p", p)
    u, v = _toric_edges(L)
    w = weight_from_probability(p)
    g = MatchingGraph(L * L)
    for k in range(u.size):
        # at L=2 the two edges between a pair of checks are distinct qubits
        g.add_edge(int(u[k]), int(v[k]), k, w, p, allow_parallel=True)
    masks, operators = _toric_logicals(L)
    return CodeInstance(g, masks, operators, {"code": "toric2d", "L": L, "T": 1, "p": p, "q": None})


def toric_3d_phenomenological(L: int, T: int, p: float, q: float) -> CodeInstance:
    """Toric code with ``T`` rounds of noisy syndrome measurement, periodic in time.

    Node ``s + L*L*t`` is check ``s`` in round ``t``.  Round ``t`` holds the
    space-like copies of all ``2*L*L`` qubits (fault ids ``2*L*L*t + j``);
    time-like edges join consecutive rounds of each check, with round
    ``T - 1`` wrapping to round 0, and carry fault ids from ``2*L*L*T`` on.
    """
    if L < 2 or T < 1:
        raise ValueError("need L >= 2 and T >= 1")
    _check_p("p", p)
    _check_p("q", q)
    nq2 = 2 * L * L
    u, v = _toric_edges(L)
    wp = weight_from_probability(p)
    wq = weight_from_probability(q)
    g = MatchingGraph(L * L * T)
    for t in range(T):
        base = L * L * t
        for k in range(u.size):
            g.add_edge(base + int(u[k]), base + int(v[k]), nq2 * t + k, wp, p, allow_parallel=True)
    if T > 1:
        fid = nq2 * T
        for t in range(T):
            nxt = (t + 1) % T
            for s in range(L * L):
                g.add_edge(L * L * t + s, L * L * nxt + s, fid, wq, q, allow_parallel=True)
                fid += 1
    masks = []
    m2, ops = _toric_logicals(L)
    for m in m2:
        masks.append(np.concatenate([m + nq2 * t for t in range(T)]))
    return CodeInstance(g, masks, ops, {"code": "toric3d", "L": L, "T": T, "p": p, "q": q})


def sample_noise(code: CodeInstance, rng: np.random.Generator,
                 error_probabilities=None) -> NoiseSample:
    """Flip every edge independently with its error probability.

    ``error_probabilities`` (scalar or per-edge) overrides the probabilities
    stored on the graph, which lets noise be drawn at a rate the weights
    were not built for.
    """
    a = code.graph.arrays()
    probs = a.edge_probability if error_probabilities is None else np.broadcast_to(
        np.asarray(error_probabilities, float), a.edge_probability.shape)
    if np.isnan(probs).any():
        k = int(np.flatnonzero(np.isnan(probs))[0])
        raise ValueError(f"edge {k} has no error probability; sampling needs one on every edge")
    flipped = rng.random(probs.size) < probs
    # zero-probability boundary links never fire
    edges = np.flatnonzero(flipped)
    counts = np.diff(a.qubit_ptr)
    sel = np.repeat(flipped, counts)
    noise = (np.bincount(a.qubit_ids[sel], minlength=a.num_qubits) % 2).astype(np.uint8)
    syndrome = ((np.bincount(a.edge_u[edges], minlength=a.num_nodes)
                 + np.bincount(a.edge_v[edges], minlength=a.num_nodes)) % 2).astype(np.uint8)
    syndrome[a.is_boundary] = 0
    return NoiseSample(noise, syndrome, edges)


def logical_failure(code: CodeInstance, noise, correction) -> np.ndarray:
    """Parity of ``noise XOR correction`` over each logical mask.

    Raises
    ------
    ValueError
        If the correction does not reproduce the syndrome of the noise.
    """
    residual = np.bitwise_xor(np.asarray(noise, np.uint8), np.asarray(correction, np.uint8))
    if code.syndrome_of(residual).any():
        raise ValueError("correction is inconsistent with the syndrome of the noise")
    return ((code.mask_matrix() @ residual.astype(np.int64)) % 2).astype(np.uint8)
