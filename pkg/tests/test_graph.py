import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import sparse

from matchdec.exceptions import GraphValidationError
from matchdec.graph import CheckMatrix, MatchingGraph, from_check_matrix, weight_from_probability

REP_H = np.array([
    [1, 1, 0, 0, 0],
    [0, 1, 1, 0, 0],
    [0, 0, 1, 1, 0],
    [0, 0, 0, 1, 1],
])


def test_repetition_matrix_builds_path_with_one_boundary():
    g = from_check_matrix(REP_H)
    assert g.num_nodes == 5
    assert g.boundary_nodes == {4}
    assert g.num_qubits == 5
    pairs = {frozenset((e.u, e.v)): e.qubit_ids for e in g.edges}
    assert pairs == {
        frozenset((0, 4)): {0},
        frozenset((0, 1)): {1},
        frozenset((1, 2)): {2},
        frozenset((2, 3)): {3},
        frozenset((3, 4)): {4},
    }
    assert all(e.weight == 1.0 and e.error_probability is None for e in g.edges)


def test_sparse_matrix_input_matches_dense():
    assert from_check_matrix(sparse.csr_matrix(REP_H)).same_as(from_check_matrix(REP_H))


def test_empty_matrix():
    g = from_check_matrix(np.zeros((1, 0), dtype=np.uint8))
    assert g.num_nodes == 1 and g.num_edges == 0 and not g.boundary_nodes


def test_single_weight_two_column():
    g = from_check_matrix(np.array([[1], [1]]), weights=[0.7])
    assert g.num_nodes == 2 and g.num_edges == 1
    e = g.edges[0]
    assert (e.u, e.v, e.qubit_ids, e.weight) == (0, 1, {0}, 0.7)


@pytest.mark.parametrize("column", [np.array([[0], [0]]), np.array([[1], [1], [1]])])
def test_bad_column_weight_names_column(column):
    H = np.hstack([np.array([[1], [1]] + [[0]] * (column.shape[0] - 2)), column])
    with pytest.raises(GraphValidationError, match="column 1"):
        from_check_matrix(H)


def test_negative_column_weight_rejected():
    with pytest.raises(ValueError):
        from_check_matrix(REP_H, weights=[1, 1, -1, 1, 1])


def test_check_matrix_rejects_duplicates_and_range():
    with pytest.raises(ValueError, match="duplicate"):
        CheckMatrix(2, 2, [(0, 0), (0, 0)])
    with pytest.raises(ValueError, match="outside"):
        CheckMatrix(2, 2, [(2, 0)])


def test_add_edge_probability_weight():
    g = MatchingGraph(2)
    w = weight_from_probability(0.2)
    g.add_edge(0, 1, 0, w, 0.2)
    assert g.num_edges == 1
    assert math.isclose(g.edges[0].weight, math.log(4))


def test_hook_edge_and_qubit_count_growth():
    g = MatchingGraph()
    g.add_edge(2, 4, {2, 3}, 1.5)
    assert g.edges[0].qubit_ids == {2, 3}
    assert g.num_nodes == 5 and g.num_qubits == 4


def test_minus_one_means_no_qubit():
    g = MatchingGraph(6)
    g.add_edge(0, 5, -1, 0.0)
    assert g.edges[0].qubit_ids == frozenset()
    assert g.num_qubits == 0


def test_duplicate_edge_keeps_lighter():
    g = MatchingGraph()
    g.add_edge(0, 1, 0, 2.0)
    g.add_edge(1, 0, 1, 1.0)
    g.add_edge(0, 1, 2, 3.0)
    assert g.num_edges == 1
    assert g.edges[0].weight == 1.0 and g.edges[0].qubit_ids == {1}
    assert g.adjacency == [[0], [0]]


def test_parallel_edges_when_allowed():
    g = MatchingGraph()
    g.add_edge(0, 1, 0, 2.0, allow_parallel=True)
    g.add_edge(0, 1, 1, 1.0, allow_parallel=True)
    assert g.num_edges == 2
    assert g.edges[g.edge_index(0, 1)].weight == 1.0


@pytest.mark.parametrize("args", [(0, 0, 0, 1.0), (0, 1, 0, -1.0), (0, 1, 0, math.inf)])
def test_add_edge_rejects_bad_input(args):
    with pytest.raises(ValueError):
        MatchingGraph().add_edge(*args)


def test_set_boundary_and_validate_joins_boundary_nodes():
    g = from_check_matrix(REP_H)
    g.set_boundary({0, 4})
    g.validate()
    extra = [e for e in g.edges if {e.u, e.v} == {0, 4} and e.weight == 0.0]
    assert len(extra) == 1 and extra[0].qubit_ids == frozenset()
    # idempotent
    n = g.num_edges
    g.validate()
    assert g.num_edges == n


def test_validate_uses_existing_zero_weight_path():
    g = MatchingGraph(3)
    g.add_edge(0, 1, -1, 0.0)
    g.add_edge(1, 2, -1, 0.0)
    g.set_boundary({0, 2})
    g.validate()
    assert g.num_edges == 2


def test_set_boundary_out_of_range():
    with pytest.raises(ValueError):
        MatchingGraph(2).set_boundary({3})


def test_validate_reports_negative_weight_by_index():
    g = MatchingGraph()
    g.add_edge(0, 1, 0, 1.0)
    g.add_edge(1, 2, 1, 1.0)
    # bypass add_edge to corrupt the stored graph
    from matchdec.graph import Edge
    g.edges[1] = Edge(1, 2, frozenset({1}), -1.0)
    with pytest.raises(GraphValidationError, match="negative weight on edge 1"):
        g.validate()


def test_validate_reports_adjacency_desync_and_collects_all():
    g = MatchingGraph()
    g.add_edge(0, 1, 0, 1.0)
    g.add_edge(1, 2, 1, 1.0)
    g.adjacency[2] = []
    g.num_qubits = 1
    with pytest.raises(GraphValidationError) as info:
        g.validate()
    problems = info.value.problems
    assert any("adjacency of node 2" in p for p in problems)
    assert any("qubit id 1" in p for p in problems)


def test_check_matrix_round_trip():
    g = from_check_matrix(REP_H)
    assert np.array_equal(g.check_matrix()[:4], REP_H)
    assert not g.check_matrix()[4].any()


@given(st.floats(min_value=1e-6, max_value=0.499), st.floats(min_value=1e-6, max_value=0.499))
def test_weight_strictly_decreasing_in_probability(p1, p2):
    if p1 < p2:
        assert weight_from_probability(p1) > weight_from_probability(p2)


@pytest.mark.parametrize("p", [0.0, 0.5, 0.7, -0.1])
def test_weight_rejects_out_of_range(p):
    with pytest.raises(ValueError):
        weight_from_probability(p)


@st.composite
def check_matrices(draw):
    rows = draw(st.integers(1, 8))
    cols = draw(st.integers(0, 12))
    H = np.zeros((rows, cols), np.uint8)
    for c in range(cols):
        k = draw(st.integers(1, min(2, rows)))
        rs = draw(st.lists(st.integers(0, rows - 1), min_size=k, max_size=k, unique=True))
        H[rs, c] = 1
    return H


@settings(max_examples=60, deadline=None)
@given(check_matrices())
def test_check_matrix_properties(H):
    g = from_check_matrix(H)
    has_weight_one = bool((H.sum(axis=0) == 1).any())
    assert bool(g.boundary_nodes) == has_weight_one
    assert g.num_nodes == H.shape[0] + has_weight_one
    # each qubit on exactly one edge
    counts = np.zeros(H.shape[1], int)
    for e in g.edges:
        for q in e.qubit_ids:
            counts[q] += 1
    assert np.all(counts == 1)
    assert np.array_equal(g.check_matrix()[:H.shape[0]], H)
