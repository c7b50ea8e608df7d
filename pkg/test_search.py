"""
Tests for connected-set enumeration and the exact and heuristic isoperimetric profiles
"""
from itertools import combinations

import pytest

from commands.search_commands import construction_candidates, search_region
from modules.errors import ParameterError
from modules.generators import (
    CompleteOracle, CycleOracle, LamplighterOracle, PathOracle, TorusOracle, comb_attached_tree, parse_spec,
)
from modules.graph_core import is_connected_subset, materialize
from modules.search import (
    EXACT_ALL, EXACT_CONNECTED, HEURISTIC, SearchConfig, enum_connected_sets, exact_profile,
    heuristic_profile, interior_region, search_profile,
)
from utils.command_utils import LoadedGraph
from utils.work_budget import BudgetExceeded


def whole(oracle):
    return materialize(oracle, oracle.root(), 100)


@pytest.mark.parametrize("oracle, counts", [
    (PathOracle(5), {1: 5, 2: 4, 3: 3, 4: 2, 5: 1}),
    (CycleOracle(6), {1: 6, 2: 6, 3: 6, 5: 6, 6: 1}),
    (CompleteOracle(4), {1: 4, 2: 6, 3: 4, 4: 1}),
])
def test_enum_connected_counts(oracle, counts):
    g, t = whole(oracle)
    for n, expected in counts.items():
        sets = list(enum_connected_sets(g, range(g.n), n))
        assert len(sets) == expected
        assert len(set(sets)) == expected


def test_enum_matches_brute_force(lattice2_ball):
    oracle, g, t = lattice2_ball
    region = search_region(g, t, 3)
    for n in range(1, 5):
        found = set(enum_connected_sets(g, region, n))
        brute = {A for A in combinations(region, n) if is_connected_subset(g, A)}
        assert found == brute


def test_enum_parallel_order(lattice2_ball):
    oracle, g, t = lattice2_ball
    region = search_region(g, t, 4)
    assert list(enum_connected_sets(g, region, 4, jobs=3)) == list(enum_connected_sets(g, region, 4))


def test_enum_rejects_empty_size():
    g, t = whole(PathOracle(3))
    with pytest.raises(ParameterError):
        list(enum_connected_sets(g, range(3), 0))


def test_interior_region(tree3):
    g, t = materialize(tree3, tree3.root(), 3)
    assert len(interior_region(g, t)) == 10
    g, t = whole(CycleOracle(5))
    assert interior_region(g, t) == tuple(range(5))


def test_exact_tree_profile(tree3_ball):
    oracle, g, t = tree3_ball
    # Every connected n-set of the 3-regular tree has n + 2 boundary vertices,
    # so any region holding connected sets of size 8 gives the true profile.
    region = search_region(g, t, 4)
    assert len(region) == 22
    profile = exact_profile(g, t, region, 8)
    assert profile.values() == {n: n + 2 for n in range(1, 9)}
    assert all(profile[n].method == EXACT_CONNECTED for n in range(1, 9))
    assert len(profile[8].witness) == 8
    assert is_connected_subset(g, profile[8].witness)


def test_tree_profile_over_all_subsets(tree3_ball):
    oracle, g, t = tree3_ball
    region = search_region(g, t, 4)
    profile = exact_profile(g, t, region, 5, mode="all")
    assert profile.values() == {n: n + 2 for n in range(1, 6)}
    assert all(profile[n].method == EXACT_ALL for n in range(1, 6))


def test_exact_comb_profile(comb):
    g, t = materialize(comb, comb.root(), 8)
    region = search_region(g, t, 5)
    profile = exact_profile(g, t, region, 7)
    # A whole hanging tree of depth k has the single boundary vertex s_k
    for k in (1, 2):
        assert profile[2 ** (k + 1) - 1].min_boundary == 1
    assert profile[1].min_boundary == 1
    # Of size 7 only the tree hanging from s2 is cut off by one vertex
    assert set(profile[7].witness) == {g.index[v] for v in comb_attached_tree(2)}


def test_exact_all_agrees_on_small_tree_region(tree3_ball):
    oracle, g, t = tree3_ball
    region = search_region(g, t, 3)
    assert len(region) == 10
    profile = exact_profile(g, t, region, 4, mode="all")
    assert profile.values() == {1: 3, 2: 4, 3: 5, 4: 6}
    assert profile[1].method == EXACT_ALL
    assert profile[1].witness == (region[0],)


def test_exact_lattice_profile(lattice2_ball):
    oracle, g, t = lattice2_ball
    profile = exact_profile(g, t, search_region(g, t, 5), 5, jobs=2)
    assert profile.values() == {1: 4, 2: 6, 3: 7, 4: 8, 5: 8}


def test_exact_cycle_profile():
    g, t = whole(CycleOracle(12))
    profile = exact_profile(g, t, range(12), 11)
    assert profile.values() == {**{n: 2 for n in range(1, 11)}, 11: 1}


def test_exact_profile_budget(tree3_ball):
    oracle, g, t = tree3_ball
    with pytest.raises(BudgetExceeded):
        exact_profile(g, t, search_region(g, t, 5), 5, budget=10)


def test_exact_profile_rejects_bad_input(tree3_ball):
    oracle, g, t = tree3_ball
    with pytest.raises(ParameterError):
        exact_profile(g, t, search_region(g, t, 5), 3, mode="all")
    with pytest.raises(ParameterError):
        exact_profile(g, t, [t.root_index], 3, mode="fast")
    with pytest.raises(ParameterError):
        exact_profile(g, t, [t.root_index], 0)


def test_heuristic_never_undercuts_exact(lattice2_ball):
    oracle, g, t = lattice2_ball
    region = search_region(g, t, 6)
    exact = exact_profile(g, t, region, 6).values()
    config = SearchConfig(region=region, n_max=6, seed=3, steps=300, chains=2)
    heuristic = heuristic_profile(g, t, config)
    for n, value in heuristic.values().items():
        assert value >= exact[n]
        assert is_connected_subset(g, heuristic[n].witness)
        assert heuristic[n].method == HEURISTIC


def test_heuristic_is_deterministic(lattice2_ball):
    oracle, g, t = lattice2_ball
    config = SearchConfig(region=search_region(g, t, 8), n_max=8, seed=7, steps=200, chains=2)
    first = heuristic_profile(g, t, config)
    assert heuristic_profile(g, t, config).entries == first.entries
    assert heuristic_profile(g, t, config, jobs=3).entries == first.entries


def test_heuristic_finds_diamond_on_torus():
    g, t = whole(TorusOracle(16))
    config = SearchConfig(region=tuple(range(g.n)), n_max=13, steps=200, chains=1)
    profile = heuristic_profile(g, t, config)
    assert profile[13].min_boundary <= 12
    assert profile[1].min_boundary == 4


def test_heuristic_candidates(tree3_ball):
    oracle, g, t = tree3_ball
    region = search_region(g, t, 4)
    config = SearchConfig(region=region, n_max=4, steps=0)
    candidate = g.vertex_set([(), (0,), (1,)])
    profile = heuristic_profile(g, t, config, candidates=[candidate])
    assert profile[3].min_boundary == 5

    with pytest.raises(ParameterError):
        heuristic_profile(g, t, config, candidates=[g.vertex_set([(0,), (1,)])])


def test_search_config_validation(tree3_ball):
    oracle, g, t = tree3_ball
    region = search_region(g, t, 3)
    for bad in (
        SearchConfig(region=region, n_max=3, mode="random"),
        SearchConfig(region=region, n_max=0),
        SearchConfig(region=region, n_max=3, seed=-1),
        SearchConfig(region=region, n_max=3, cooling=1.5),
        SearchConfig(region=region, n_max=3, chains=0),
    ):
        with pytest.raises(ParameterError):
            search_profile(g, t, bad)


def test_search_profile_dispatch_and_rows(tree3_ball):
    oracle, g, t = tree3_ball
    config = SearchConfig(region=search_region(g, t, 2), n_max=2, mode="connected")
    profile = search_profile(g, t, config)
    rows = profile.csv_rows(g)
    assert rows[0] == (1, 3, EXACT_CONNECTED, "r")
    assert rows[1][:3] == (2, 4, EXACT_CONNECTED)
    assert rows[1][3] == "r r.0"


def test_named_constructions_seed_the_lamplighter_search():
    oracle = LamplighterOracle()
    g, t = materialize(oracle, oracle.root(), 11)
    loaded = LoadedGraph(g, t, oracle, "lamplighter", parse_spec("lamplighter"))
    region = search_region(g, t, 64)
    candidates = construction_candidates(loaded, region, 64)
    assert [len(A) for A in candidates] == [2, 8, 24, 64]

    config = SearchConfig(region=region, n_max=64, steps=0, chains=1, greedy_seeds=0)
    profile = heuristic_profile(g, t, config, candidates=candidates)
    assert profile[64].min_boundary <= 32
    assert profile[24].min_boundary <= 16


def test_named_constructions_skip_sets_outside_the_region():
    oracle = LamplighterOracle()
    g, t = materialize(oracle, oracle.root(), 8)
    loaded = LoadedGraph(g, t, oracle, "lamplighter", parse_spec("lamplighter"))
    candidates = construction_candidates(loaded, search_region(g, t, 64), 64)
    assert [len(A) for A in candidates] == [2, 8, 24]

    g, t = whole(CycleOracle(8))
    assert construction_candidates(LoadedGraph(g, t, CycleOracle(8), "cycle:8"), range(8), 8) == []
