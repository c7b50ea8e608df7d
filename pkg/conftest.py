"""
Shared fixtures for the isogrowth test suite
"""
import random

import pytest

from modules.generators import (
    CombTreeOracle, LamplighterOracle, LatticeOracle, RegularTreeOracle,
)
from modules.graph_core import materialize


@pytest.fixture
def tree3():
    return RegularTreeOracle(3)


@pytest.fixture
def tree3_ball():
    oracle = RegularTreeOracle(3)
    g, t = materialize(oracle, oracle.root(), 12)
    return oracle, g, t


@pytest.fixture
def tree4_ball():
    oracle = RegularTreeOracle(4)
    g, t = materialize(oracle, oracle.root(), 9)
    return oracle, g, t


@pytest.fixture
def lattice2_ball():
    oracle = LatticeOracle(2)
    g, t = materialize(oracle, oracle.root(), 10)
    return oracle, g, t


@pytest.fixture
def lamplighter_ball():
    oracle = LamplighterOracle()
    g, t = materialize(oracle, oracle.root(), 12)
    return oracle, g, t


@pytest.fixture
def comb():
    return CombTreeOracle()


def random_connected_set(g, start, size, rng, allowed=None):
    """
    Grow a connected set from start by adding a uniformly chosen neighbor of the
    current set, optionally restricted to allowed indices.
    """
    members = [start]
    member_set = {start}
    while len(members) < size:
        frontier = sorted({w for v in members for w in g.adjacency[v]
                           if w not in member_set and (allowed is None or w in allowed)})
        if not frontier:
            break
        w = rng.choice(frontier)
        members.append(w)
        member_set.add(w)
    return tuple(sorted(members))


@pytest.fixture
def distinct_connected_sets():
    """
    Factory: count distinct seeded random connected sets of sizes 1..max_size, started
    anywhere within root distance max_depth and kept there
    """
    def make(g, t, count, max_size, max_depth, seed=0):
        rng = random.Random(seed)
        allowed = {i for i in range(g.n) if t.depth(i) <= max_depth}
        starts = sorted(allowed)
        found = {}
        for _ in range(count * 50):
            if len(found) == count:
                break
            A = random_connected_set(g, rng.choice(starts), rng.randint(1, max_size), rng, allowed)
            found.setdefault(A, None)
        return list(found)
    return make
