"""
Tests for truncations, BFS balls, boundaries and distance histograms
"""
import networkx as nx
import numpy as np
import pytest

from modules.errors import DisconnectedGraphError, MarginError, ParameterError, ResourceLimitError
from modules.generators import (
    CycleOracle, LamplighterOracle, LatticeOracle, PathOracle, RegularTreeOracle, TorusOracle,
    lamplighter_box,
)
from modules.graph_core import (
    CERTIFICATE_MODE, FiniteGraph, ball_members, ball_sizes, bfs_distances, boundary,
    check_oracle_symmetry, diameter, distance_histogram, induced_components, interior_check,
    is_connected_subset, is_tree, materialize, oracle_boundary, oracle_distances,
)


def test_materialize_tree_ball(tree3):
    g, t = materialize(tree3, tree3.root(), 3)
    assert g.n == 3 * 2 ** 3 - 2
    assert g.encodings == sorted(g.encodings)
    assert t.root_index == 0 and g.encodings[0] == "r"
    assert not t.complete
    assert len(t.frontier()) == 3 * 2 ** 2
    assert t.depth(g.index_of((0, 1))) == 2


def test_materialize_is_deterministic(tree3):
    g1, t1 = materialize(tree3, tree3.root(), 5)
    g2, t2 = materialize(tree3, tree3.root(), 5)
    assert g1.encodings == g2.encodings
    assert g1.adjacency == g2.adjacency
    assert np.array_equal(t1.dist, t2.dist)


def test_materialize_resource_limit(tree3):
    with pytest.raises(ResourceLimitError):
        materialize(tree3, tree3.root(), 10, max_vertices=100)


def test_negative_radius_rejected(tree3):
    with pytest.raises(ParameterError):
        materialize(tree3, tree3.root(), -1)


def test_finite_family_is_complete():
    oracle = CycleOracle(6)
    g, t = materialize(oracle, 0, 10)
    assert g.n == 6
    assert t.complete
    assert t.frontier() == ()
    assert interior_check(t, range(6))


def test_tree_ball_sizes(tree3_ball):
    oracle, g, t = tree3_ball
    sizes = ball_sizes(g, t, oracle.root(), 8)
    assert sizes == [1] + [3 * 2 ** r - 2 for r in range(1, 9)]


def test_lattice_ball_sizes(lattice2_ball):
    oracle, g, t = lattice2_ball
    sizes = ball_sizes(g, t, oracle.root(), 6)
    assert sizes == [2 * r * r + 2 * r + 1 for r in range(7)]


def test_ball_margin_enforced(tree3_ball):
    oracle, g, t = tree3_ball
    v = (0, 0, 0)  # depth 3
    assert len(ball_sizes(g, t, v, 9)) == 10
    with pytest.raises(MarginError) as excinfo:
        ball_sizes(g, t, v, 10)
    assert excinfo.value.needed == 13
    assert excinfo.value.radius == 12


def test_ball_members(tree3_ball):
    oracle, g, t = tree3_ball
    members = ball_members(g, t, t.root_index, 2)
    assert len(members) == 10
    assert list(members) == sorted(members)


def test_boundary_of_singleton(tree3_ball):
    oracle, g, t = tree3_ball
    A = g.vertex_set([oracle.root()])
    assert len(boundary(g, t, A)) == 3


def test_boundary_of_ball_is_next_sphere(tree3_ball):
    oracle, g, t = tree3_ball
    A = ball_members(g, t, t.root_index, 3)
    dA = boundary(g, t, A)
    assert len(dA) == 3 * 2 ** 3
    assert all(t.depth(u) == 4 for u in dA)


def test_boundary_refuses_frontier_sets(tree3):
    g, t = materialize(tree3, tree3.root(), 3)
    frontier_vertex = t.frontier()[0]
    with pytest.raises(MarginError):
        boundary(g, t, [frontier_vertex])


def test_distance_histogram(tree3_ball):
    oracle, g, t = tree3_ball
    A = ball_members(g, t, t.root_index, 1)
    histogram = distance_histogram(g, t, A, (0, 0))
    assert histogram == {1: 1, 2: 1, 3: 2}
    assert sum(histogram.values()) == len(A)


def test_distance_histogram_needs_certificate_margin(tree3):
    g, t = materialize(tree3, tree3.root(), 5)
    A = ball_members(g, t, t.root_index, 1)
    assert interior_check(t, A, CERTIFICATE_MODE)
    with pytest.raises(MarginError):
        distance_histogram(g, t, A, (0, 0))


def test_bfs_distances_stop_at_radius(tree3_ball):
    oracle, g, t = tree3_ball
    dist = bfs_distances(g, [t.root_index], max_radius=2)
    assert int((dist >= 0).sum()) == 10
    assert int(dist.max()) == 2


def test_multi_source_bfs(lattice2_ball):
    oracle, g, t = lattice2_ball
    sources = [g.index_of((0, 0)), g.index_of((4, 0))]
    dist = bfs_distances(g, sources)
    assert dist[g.index_of((2, 0))] == 2
    assert dist[g.index_of((5, 1))] == 2


def test_diameter_of_finite_families():
    cycle, _ = materialize(CycleOracle(9), 0, 20)
    path, _ = materialize(PathOracle(10), 0, 20)
    torus, _ = materialize(TorusOracle(8), (0, 0), 20)
    assert diameter(cycle) == 4
    assert diameter(path) == 9
    assert diameter(torus) == 8


def test_diameter_of_disconnected_graph():
    g = FiniteGraph(["a", "b"], ["a", "b"], [[], []])
    with pytest.raises(DisconnectedGraphError):
        diameter(g)


def test_is_tree(tree3_ball):
    oracle, g, t = tree3_ball
    assert is_tree(g)
    cycle, _ = materialize(CycleOracle(5), 0, 10)
    assert not is_tree(cycle)


def test_connected_subsets_and_components(lattice2_ball):
    oracle, g, t = lattice2_ball
    line = [g.index_of((x, 0)) for x in range(3)]
    gap = [g.index_of((0, 0)), g.index_of((2, 0))]
    assert is_connected_subset(g, line)
    assert not is_connected_subset(g, gap)
    assert len(induced_components(g, gap)) == 2


def test_oracle_boundary_of_lamplighter_box():
    oracle = LamplighterOracle()
    for n in range(2, 5):
        assert len(oracle_boundary(oracle, lamplighter_box(n))) == 2 ** (n + 2)


def test_oracle_distances():
    oracle = RegularTreeOracle(3)
    distances = oracle_distances(oracle, (), [(0, 1), (2,), ()])
    assert distances == {(0, 1): 2, (2,): 1, (): 0}


def test_oracles_are_symmetric():
    tree = RegularTreeOracle(4)
    lamplighter = LamplighterOracle()
    lattice = LatticeOracle(3)
    assert check_oracle_symmetry(tree, [(), (0,), (1, 2), (3, 0, 1)]) == []
    assert check_oracle_symmetry(lamplighter, lamplighter_box(2)) == []
    assert check_oracle_symmetry(lattice, [(0, 0, 0), (1, -2, 3)]) == []


def test_networkx_view_and_back(tree3_ball):
    oracle, g, t = tree3_ball
    view = g.nx_graph
    assert view.number_of_nodes() == g.n
    assert view.number_of_edges() == g.edge_count()
    assert sorted(view.adj[t.root_index]) == list(g.adjacency[t.root_index])

    labelled = nx.relabel_nodes(view, dict(enumerate(g.encodings)))
    copy = FiniteGraph.from_nx(labelled)
    assert copy.encodings == g.encodings
    assert copy.adjacency == g.adjacency
