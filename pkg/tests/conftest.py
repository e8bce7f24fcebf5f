import numpy as np
import pytest

from matchdec.graph import MatchingGraph

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def gf2_nullspace(H: np.ndarray) -> np.ndarray:
    """Basis of the kernel of ``H`` over GF(2), one vector per row."""
    A = (np.asarray(H) % 2).astype(np.uint8).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        hit = np.flatnonzero(A[r:, c]) if r < rows else []
        if len(hit) == 0:
            continue
        k = r + hit[0]
        A[[r, k]] = A[[k, r]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), np.uint8)
    for j, f in enumerate(free):
        basis[j, f] = 1
        for i, pc in enumerate(pivots):
            basis[j, pc] = A[i, f]
    return basis


def gf2_rank(M: np.ndarray) -> int:
    A = (np.asarray(M) % 2).astype(np.uint8).copy()
    rank = 0
    rows, cols = A.shape
    for c in range(cols):
        hit = np.flatnonzero(A[rank:, c])
        if hit.size == 0:
            continue
        k = rank + hit[0]
        A[[rank, k]] = A[[k, rank]]
        below = np.flatnonzero(A[:, c])
        below = below[below != rank]
        A[below] ^= A[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def random_graph(rng, n, num_edges, integer_weights=False, p_boundary=0.0):
    g = MatchingGraph(n)
    q = 0
    for _ in range(num_edges):
        a, b = (int(x) for x in rng.integers(0, n, 2))
        if a == b:
            continue
        w = float(rng.integers(0, 4)) if integer_weights else float(rng.random())
        g.add_edge(a, b, q, w)
        q += 1
    if p_boundary:
        g.set_boundary([i for i in range(n) if rng.random() < p_boundary])
    return g


def assert_syndrome_consistent(graph, syndrome_fixed, correction):
    """H . c == s over non-boundary nodes."""
    H = graph.check_matrix().astype(np.int64)
    s = np.asarray(syndrome_fixed).astype(np.int64).copy()
    s[sorted(graph.boundary_nodes)] = 0
    assert np.array_equal((H @ correction.astype(np.int64)) % 2, s)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
