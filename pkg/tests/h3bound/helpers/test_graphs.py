"""Tests for n-graph structure, enumeration and the window checks."""

import numpy as np
import pytest

from h3bound.errors import (
    DataError,
    GirthPreconditionError,
    GraphError,
    UnreducedPathError,
)
from h3bound.helpers import (
    DirectedEdgePath,
    LengthAssignment,
    TrivalentGraph,
    canonical_code,
    catalog_lines,
    cyclic_window_maxima,
    edge_count,
    enumerate_by_pairings,
    enumerate_n_graphs,
    girth_length,
    random_reduced_closed_path,
    reduced_closed_paths,
    simple_cycles,
    two_long_edges_check,
    vertex_count,
    window_long_edge_check,
)
from h3bound.helpers.graphs import non_backtracking_matrix

from ...common import load_cases

GRAPH_COUNTS = load_cases("graph_counts.json")


@pytest.fixture
def theta() -> TrivalentGraph:
    """Two vertices joined by three edges."""
    return TrivalentGraph.theta()


@pytest.fixture
def dumbbell() -> TrivalentGraph:
    """Two loops joined by a bar."""
    return TrivalentGraph.dumbbell()


class TestCounts:
    """Test edge and vertex counts."""

    @pytest.mark.parametrize("case", GRAPH_COUNTS, ids=[c["name"] for c in GRAPH_COUNTS])
    def test_counts_from_fixture(self, case):
        """Test edge, vertex and isomorphism class counts per rank."""
        n = case["input"]["n"]
        expected = case["expected"]
        assert edge_count(n) == expected["edges"]
        assert vertex_count(n) == expected["vertices"]
        graphs = enumerate_n_graphs(n)
        assert len(graphs) == expected["count"]
        assert all(g.rank == n and g.num_edges == expected["edges"] for g in graphs)

    def test_rank_one_is_rejected(self):
        """Test n <= 1 raises GraphError."""
        with pytest.raises(GraphError):
            edge_count(1)

    @pytest.mark.parametrize("n", [1, 6])
    def test_enumeration_range(self, n):
        """Test ranks outside the supported range raise GraphError."""
        with pytest.raises(GraphError):
            enumerate_n_graphs(n)

    @pytest.mark.parametrize("n", [2, 3])
    def test_pairing_enumeration_agrees(self, n):
        """Test growth enumeration against brute force over dart pairings."""
        grown = [canonical_code(g) for g in enumerate_n_graphs(n)]
        brute = [canonical_code(g) for g in enumerate_by_pairings(n)]
        assert grown == brute

    @pytest.mark.slow
    def test_rank_five_count(self):
        """Test the rank 5 catalog has 71 graphs."""
        assert len(enumerate_n_graphs(5)) == 71


class TestTrivalentGraph:
    """Test graph construction and serialization."""

    def test_theta_structure(self, theta):
        """Test the theta graph has no loops and Euler characteristic -1."""
        assert theta.rank == 2
        assert theta.euler_characteristic == -1
        assert not any(theta.is_loop(e) for e in range(theta.num_edges))
        assert theta.adjacency_matrix().tolist() == [[0, 3], [3, 0]]

    def test_dumbbell_structure(self, dumbbell):
        """Test the dumbbell has two loops."""
        assert [dumbbell.is_loop(e) for e in range(3)] == [True, False, True]

    def test_degree_is_checked(self):
        """Test a vertex with four half-edges is rejected."""
        with pytest.raises(GraphError):
            TrivalentGraph.from_edges([(0, 1), (0, 1), (0, 1), (0, 1)])

    def test_pairing_must_be_involution(self):
        """Test a pairing that is not an involution is rejected."""
        with pytest.raises(GraphError):
            TrivalentGraph((1, 2, 0, 4, 5, 3))

    def test_disconnected_graph_is_rejected(self):
        """Test two disjoint theta graphs do not form an n-graph."""
        edges = [(0, 1)] * 3 + [(2, 3)] * 3
        with pytest.raises(GraphError):
            TrivalentGraph.from_edges(edges)

    def test_dict_round_trip(self, dumbbell):
        """Test to_dict and from_dict, also from an edge list."""
        assert TrivalentGraph.from_dict(dumbbell.to_dict()) == dumbbell
        assert TrivalentGraph.from_dict({"edges": [[0, 0], [0, 1], [1, 1]]}) == dumbbell

    def test_malformed_dict_is_data_error(self):
        """Test a mapping without pairing or edges raises DataError."""
        with pytest.raises(DataError):
            TrivalentGraph.from_dict({"vertices": 2})

    def test_canonical_code_ignores_labels(self):
        """Test relabeling vertices keeps the canonical code."""
        a = TrivalentGraph.from_edges([(0, 0), (0, 1), (1, 2), (2, 3), (2, 3), (1, 3)])
        b = TrivalentGraph.from_edges([(3, 3), (3, 2), (2, 1), (1, 0), (1, 0), (2, 0)])
        assert canonical_code(a) == canonical_code(b)
        assert canonical_code(TrivalentGraph.theta()) == "030"
        assert canonical_code(TrivalentGraph.dumbbell()) == "111"

    def test_catalog_lines(self):
        """Test one catalog line per graph in canonical order."""
        lines = catalog_lines(enumerate_n_graphs(2))
        assert lines == ["030 [(0, 1), (0, 1), (0, 1)]", "111 [(0, 0), (0, 1), (1, 1)]"]


class TestLengths:
    """Test length assignments."""

    def test_lengths_must_be_positive(self):
        """Test zero and negative lengths raise GraphError."""
        with pytest.raises(GraphError):
            LengthAssignment((1.0, 0.0, 2.0))
        with pytest.raises(GraphError):
            LengthAssignment((1.0, -1.0, 2.0))

    def test_for_graph_checks_count(self, theta):
        """Test the number of lengths must match the number of edges."""
        with pytest.raises(GraphError):
            LengthAssignment((1.0, 2.0)).for_graph(theta)

    def test_scaled(self):
        """Test scaling multiplies every length."""
        weights = LengthAssignment((1.0, 2.0, 3.0)).scaled(2.0)
        assert weights.lengths == (2.0, 4.0, 6.0)
        assert weights.total == 12.0


class TestPaths:
    """Test directed edge paths on the theta graph."""

    def test_closed_reduced_path(self, theta):
        """Test out along edge 0 and back along edge 1."""
        path = DirectedEdgePath(((0, True), (1, False)))
        path.validate(theta)
        assert path.is_closed(theta)
        assert path.is_reduced(theta)

    def test_backtracking_is_not_reduced(self, theta):
        """Test going out and back along the same edge."""
        path = DirectedEdgePath(((0, True), (0, False)))
        assert path.is_closed(theta)
        assert not path.is_reduced(theta)

    def test_broken_path_fails_validation(self, theta):
        """Test consecutive steps that do not meet raise GraphError."""
        with pytest.raises(GraphError):
            DirectedEdgePath(((0, True), (1, True))).validate(theta)
        with pytest.raises(GraphError):
            DirectedEdgePath(((7, True),)).validate(theta)

    def test_reduced_closed_paths_match_trace(self, theta):
        """Test the number of reduced closed paths of length k equals trace B^k."""
        b = non_backtracking_matrix(theta)
        for k in (2, 3, 4):
            exact = [p for p in reduced_closed_paths(theta, k) if len(p) == k]
            assert len(exact) == int(round(np.trace(np.linalg.matrix_power(b, k))))
        assert len([p for p in reduced_closed_paths(theta, 2) if len(p) == 2]) == 12

    @pytest.mark.parametrize("k", [4, 6, 40])
    def test_random_path_is_reduced_and_closed(self, k):
        """Test sampled paths on every rank 3 graph."""
        for graph in enumerate_n_graphs(3):
            path = random_reduced_closed_path(graph, k, seed=k)
            assert len(path) == k
            path.validate(graph)
            assert path.is_closed(graph)
            assert path.is_reduced(graph, cyclic=True)

    def test_random_path_is_seeded(self, theta):
        """Test equal seeds give equal paths."""
        assert random_reduced_closed_path(theta, 12, seed=7) == random_reduced_closed_path(
            theta, 12, seed=7
        )

    def test_random_path_needs_positive_length(self, theta):
        """Test k = 0 raises GraphError."""
        with pytest.raises(GraphError):
            random_reduced_closed_path(theta, 0)

    def test_theta_has_no_length_one_loop(self, theta):
        """Test a graph without loops has no closed path of length 1."""
        with pytest.raises(GraphError):
            random_reduced_closed_path(theta, 1)


class TestCycles:
    """Test simple cycles and girth."""

    def test_simple_cycles(self, theta, dumbbell):
        """Test the theta graph has three bigons and the dumbbell two loops."""
        assert simple_cycles(theta) == [(0, 1), (0, 2), (1, 2)]
        assert simple_cycles(dumbbell) == [(0,), (2,)]

    def test_girth_of_theta(self, theta):
        """Test the shortest cycle uses the two shortest edges."""
        girth = girth_length(theta, LengthAssignment((1.0, 2.0, 3.0)))
        assert girth.length == pytest.approx(3.0)
        assert sorted(girth.cycle) == [0, 1]

    def test_girth_of_dumbbell(self, dumbbell):
        """Test the bar lies on no cycle."""
        girth = girth_length(dumbbell, LengthAssignment((4.0, 0.5, 2.0)))
        assert girth.length == pytest.approx(2.0)
        assert girth.cycle == (2,)

    def test_girth_matches_cycle_enumeration(self, rng):
        """Test girth_length against the minimum over all simple cycles."""
        for graph in enumerate_n_graphs(3):
            weights = LengthAssignment(tuple(rng.uniform(0.5, 5.0, size=graph.num_edges)))
            best = min(sum(weights[e] for e in c) for c in simple_cycles(graph))
            assert girth_length(graph, weights).length == pytest.approx(best)


class TestWindows:
    """Test the long-edge window checks."""

    def test_cyclic_window_maxima(self):
        """Test windows wrap around the end of the sequence."""
        assert cyclic_window_maxima([1.0, 3.0, 2.0], 2).tolist() == [3.0, 3.0, 2.0]
        assert cyclic_window_maxima([5.0], 3).tolist() == [5.0]

    def test_window_check_passes_on_sampled_paths(self, rng):
        """Test every window of 3(n-1) steps holds an edge of girth / 3(n-1)."""
        for graph in enumerate_n_graphs(3):
            weights = LengthAssignment(tuple(rng.uniform(0.1, 3.0, size=graph.num_edges)))
            girth = girth_length(graph, weights).length
            path = random_reduced_closed_path(graph, 30, seed=rng)
            result = window_long_edge_check(graph, weights, path, 3, girth)
            assert result.passed
            assert result.window_size == 6
            assert result.threshold == pytest.approx(girth / 6)
            assert result.to_dict()["window_start"] is None

    def test_girth_precondition(self, theta):
        """Test a girth bound above the girth raises GirthPreconditionError."""
        path = DirectedEdgePath(((0, True), (1, False)))
        with pytest.raises(GirthPreconditionError):
            window_long_edge_check(theta, LengthAssignment((1.0, 1.0, 1.0)), path, 2, 3.0)

    def test_unreduced_path(self, theta):
        """Test a backtracking path raises UnreducedPathError."""
        path = DirectedEdgePath(((0, True), (0, False)))
        with pytest.raises(UnreducedPathError):
            window_long_edge_check(theta, LengthAssignment((1.0, 1.0, 1.0)), path, 2, 2.0)

    def test_open_path(self, theta):
        """Test a path that does not close raises GraphError."""
        path = DirectedEdgePath(((0, True),))
        with pytest.raises(GraphError):
            window_long_edge_check(theta, LengthAssignment((1.0, 1.0, 1.0)), path, 2, 2.0)

    def test_two_long_edges(self):
        """Test runs of 6 terms for n = 2."""
        assert two_long_edges_check([10.0, 1.0, 1.0, 10.0, 1.0, 1.0], 2, 5.0)
        assert not two_long_edges_check([10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], 2, 5.0)
        assert not two_long_edges_check([], 2, 5.0)
