"""
Extremal set search: minimum vertex boundary over sets of each size n.

exact_profile scans every connected set (mode "connected") or every subset of a
tiny region (mode "all"); heuristic_profile combines ball-like greedy growth with
simulated annealing over connectivity-preserving swaps.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import load_config
from modules.errors import ParameterError
from modules.graph_core import (
    BOUNDARY_MODE, FiniteGraph, Truncation, VertexSet, bfs_distances,
    boundary, is_connected_subset, make_vertex_set, require_interior,
)
from utils.performance_monitoring import time_function
from utils.work_budget import WorkBudget

config = load_config()
SEARCH_SETTINGS = config["SEARCH_SETTINGS"]

EXACT_ALL = "exact_all"
EXACT_CONNECTED = "exact_connected"
HEURISTIC = "heuristic"

MODE_METHODS = {"all": EXACT_ALL, "connected": EXACT_CONNECTED, "heuristic": HEURISTIC}


@dataclass(frozen=True)
class ProfileEntry:
    n: int
    min_boundary: int
    witness: VertexSet
    method: str


@dataclass
class IsoProfile:
    """n -> smallest boundary found, with the witness set and the method that found it"""
    entries: Dict[int, ProfileEntry] = field(default_factory=dict)

    def __getitem__(self, n: int) -> ProfileEntry:
        return self.entries[n]

    def __contains__(self, n: int) -> bool:
        return n in self.entries

    def __len__(self):
        return len(self.entries)

    def values(self) -> Dict[int, int]:
        return {n: e.min_boundary for n, e in sorted(self.entries.items())}

    def offer(self, n: int, boundary_size: int, witness: VertexSet, method: str):
        """Keep the candidate if it beats the current entry on (|dA|, sorted witness)"""
        current = self.entries.get(n)
        if current is None or (boundary_size, witness) < (current.min_boundary, current.witness):
            self.entries[n] = ProfileEntry(n, boundary_size, witness, method)

    def csv_rows(self, g: FiniteGraph) -> List[Tuple[int, int, str, str]]:
        """(n, min_boundary, method, witness as space-separated encodings)"""
        return [(e.n, e.min_boundary, e.method, " ".join(g.encode_set(e.witness)))
                for _, e in sorted(self.entries.items())]


@dataclass(frozen=True)
class SearchConfig:
    region: VertexSet
    n_max: int
    mode: str = "heuristic"
    seed: int = 0
    initial_temperature: float = SEARCH_SETTINGS["ANNEAL"]["INITIAL_TEMPERATURE"]
    cooling: float = SEARCH_SETTINGS["ANNEAL"]["COOLING"]
    steps: int = SEARCH_SETTINGS["ANNEAL"]["STEPS"]
    chains: int = SEARCH_SETTINGS["CHAINS"]
    greedy_seeds: int = SEARCH_SETTINGS["GREEDY_SEEDS"]

    def validate(self, g: FiniteGraph, t: Truncation):
        if self.mode not in MODE_METHODS:
            raise ParameterError(f"Unknown search mode '{self.mode}'")
        if self.n_max < 1:
            raise ParameterError(f"n_max must be >= 1, got {self.n_max}")
        if self.seed < 0:
            raise ParameterError(f"Seed must be >= 0, got {self.seed}")
        if not 0 < self.cooling <= 1 or self.initial_temperature <= 0:
            raise ParameterError("Annealing needs a positive temperature and cooling in (0, 1]")
        if self.steps < 0 or self.chains < 1 or self.greedy_seeds < 0:
            raise ParameterError("steps, chains and greedy_seeds must be non-negative (chains >= 1)")
        make_vertex_set(g, self.region)
        require_interior(t, self.region, BOUNDARY_MODE)


def interior_region(g: FiniteGraph, t: Truncation) -> VertexSet:
    """Every vertex whose boundary contribution is exact (distance <= R_t - 1)"""
    if t.complete:
        return tuple(range(g.n))
    return tuple(int(i) for i in np.flatnonzero(t.dist <= t.radius - 1))


# ======= Enumeration =======

def _extend(adjacency, root: int, n: int, members: List[int], closed: set,
            extension: List[int]) -> Iterator[VertexSet]:
    """
    One step of exclusive-neighborhood extension. closed holds members and their
    neighbors; new extension vertices must be larger than the root and outside closed.
    """
    if len(members) == n:
        yield tuple(sorted(members))
        return
    extension = sorted(extension)
    while extension:
        w = extension.pop(0)
        added = [u for u in adjacency[w] if u > root and u not in closed]
        members.append(w)
        new_closed = closed | set(added) | {w}
        yield from _extend(adjacency, root, n, members, new_closed, extension + added)
        members.pop()


def _sets_from_root(adjacency, root: int, n: int) -> Iterator[VertexSet]:
    extension = [u for u in adjacency[root] if u > root]
    closed = {root} | set(adjacency[root])
    yield from _extend(adjacency, root, n, [root], closed, extension)


def _region_adjacency(g: FiniteGraph, region: Sequence[int]) -> Dict[int, Tuple[int, ...]]:
    members = set(region)
    return {v: tuple(w for w in g.adjacency[v] if w in members) for v in region}


def enum_connected_sets(g: FiniteGraph, region: Sequence[int], n: int,
                        jobs: Optional[int] = None) -> Iterator[VertexSet]:
    """
    Every connected induced subset of region with exactly n vertices, once each

    Each set is produced from its smallest vertex; roots are visited in increasing
    order and sets within a root in extension order, so the stream is deterministic.
    With jobs > 1 the roots are expanded concurrently and merged in root order.
    """
    if n < 1:
        raise ParameterError(f"Set size must be >= 1, got {n}")
    region = make_vertex_set(g, region)
    adjacency = _region_adjacency(g, region)

    if jobs and jobs > 1 and len(region) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            partitions = executor.map(lambda root: list(_sets_from_root(adjacency, root, n)), region)
            for sets in partitions:
                yield from sets
        return
    for root in region:
        yield from _sets_from_root(adjacency, root, n)


# ======= Exact profiles =======

@time_function
def exact_profile(g: FiniteGraph, t: Truncation, region: Sequence[int], n_max: int,
                  mode: str = "connected", budget: Optional[int] = None,
                  jobs: Optional[int] = None) -> IsoProfile:
    """
    True minimum boundary for n = 1..n_max over the scanned family

    Parameters:
    - region: VertexSet inside the safe interior
    - mode: "connected" (every connected set) or "all" (every subset; region of at most MAX_ALL_REGION vertices)
    - budget: maximum number of sets visited, defaults to SEARCH_SETTINGS["BUDGET"]

    Raises BudgetExceeded once the budget is spent.
    """
    region = make_vertex_set(g, region)
    require_interior(t, region, BOUNDARY_MODE)
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    work = WorkBudget(budget if budget is not None else SEARCH_SETTINGS["BUDGET"], name=f"exact_profile[{mode}]")
    profile = IsoProfile()

    if mode == "all":
        limit = SEARCH_SETTINGS["MAX_ALL_REGION"]
        if len(region) > limit:
            raise ParameterError(f"mode=all scans every subset; region has {len(region)} vertices (limit {limit})")
        _scan_all_subsets(g, region, n_max, work, profile)
    elif mode == "connected":
        for n in range(1, min(n_max, len(region)) + 1):
            for A in enum_connected_sets(g, region, n, jobs=jobs):
                work.charge()
                profile.offer(n, len(boundary(g, t, A)), A, EXACT_CONNECTED)
    else:
        raise ParameterError(f"exact_profile mode must be 'all' or 'connected', got '{mode}'")

    logging.info(f"Exact {mode} profile over {len(region)} region vertices: {profile.values()} ({work.used} sets)")
    return profile


def _scan_all_subsets(g: FiniteGraph, region: VertexSet, n_max: int, work: WorkBudget, profile: IsoProfile):
    """Bitmask scan: bit j stands for region vertex j or one of its outside neighbors"""
    local = {}
    for v in region:
        local.setdefault(v, len(local))
    for v in region:
        for w in g.adjacency[v]:
            local.setdefault(w, len(local))
    bit = [1 << local[v] for v in region]
    neighborhood = []
    for v in region:
        mask = 0
        for w in g.adjacency[v]:
            mask |= 1 << local[w]
        neighborhood.append(mask)

    for n in range(1, min(n_max, len(region)) + 1):
        for combo in combinations(range(len(region)), n):
            work.charge()
            inside = 0
            reach = 0
            for j in combo:
                inside |= bit[j]
                reach |= neighborhood[j]
            size = bin(reach & ~inside).count("1")
            current = profile.entries.get(n)
            if current is None or size < current.min_boundary:
                profile.offer(n, size, tuple(region[j] for j in combo), EXACT_ALL)


# ======= Heuristic profile =======

class _BoundaryState:
    """A set with its boundary, updated incrementally as vertices are added"""

    def __init__(self, g: FiniteGraph, members=()):
        self.g = g
        self.members = set()
        self.boundary = set()
        for v in members:
            self.add(v)

    def gain(self, w: int) -> int:
        """|d(A + w)| - |dA| for a boundary vertex w"""
        fresh = sum(1 for x in self.g.adjacency[w] if x not in self.members and x not in self.boundary)
        return fresh - (1 if w in self.boundary else 0)

    def add(self, w: int):
        self.members.add(w)
        self.boundary.discard(w)
        for x in self.g.adjacency[w]:
            if x not in self.members:
                self.boundary.add(x)

    def snapshot(self) -> Tuple[int, VertexSet]:
        return len(self.boundary), tuple(sorted(self.members))


def _boundary_size(g: FiniteGraph, members: set) -> int:
    result = set()
    for v in members:
        for w in g.adjacency[v]:
            if w not in members:
                result.add(w)
    return len(result)


def _greedy_growth(g: FiniteGraph, region_set: set, seed: int, n_max: int) -> List[Tuple[int, VertexSet]]:
    """Add the region frontier vertex with the smallest resulting boundary, lowest index on ties"""
    state = _BoundaryState(g, [seed])
    results = [state.snapshot()]
    while len(state.members) < n_max:
        frontier = sorted(w for w in state.boundary if w in region_set)
        if not frontier:
            break
        best = min(frontier, key=lambda w: (state.gain(w), w))
        state.add(best)
        results.append(state.snapshot())
    return results


def _ball_growth(g: FiniteGraph, region: VertexSet, region_set: set, seed: int,
                 n_max: int) -> List[Tuple[int, VertexSet]]:
    """Prefixes of the BFS order from seed inside the region (ties by index)"""
    dist = bfs_distances(g, [seed])
    order = sorted((int(dist[v]), v) for v in region if dist[v] >= 0)
    state = _BoundaryState(g)
    results = []
    for _, v in order[:n_max]:
        if state.members and not any(w in state.members for w in g.adjacency[v]):
            break
        state.add(v)
        results.append(state.snapshot())
    return results


class _SwapAnnealer:
    """
    Simulated annealing over fixed-size connected sets. A move swaps one member for one
    region vertex of the boundary; only moves that keep the set connected are proposed.
    The objective is |dA|, ties broken toward the lexicographically smaller set.
    """

    def __init__(self, g: FiniteGraph, region_set: set, config: SearchConfig):
        self.g = g
        self.region_set = region_set
        self.config = config

    def run(self, start: VertexSet, n: int, chain: int) -> Tuple[int, VertexSet]:
        rng = np.random.default_rng([self.config.seed, n, chain])
        g = self.g
        current = set(start)
        current_size = _boundary_size(g, current)
        best = (current_size, tuple(sorted(current)))
        temperature = self.config.initial_temperature

        for _ in range(self.config.steps):
            members = sorted(current)
            outside = sorted({w for v in members for w in g.adjacency[v]
                              if w not in current and w in self.region_set})
            if not outside or len(members) < 2:
                break
            remove = members[int(rng.integers(len(members)))]
            add = outside[int(rng.integers(len(outside)))]
            candidate = (current - {remove}) | {add}
            if remove == add or not is_connected_subset(g, sorted(candidate)):
                temperature *= self.config.cooling
                continue
            size = _boundary_size(g, candidate)
            delta = size - current_size
            if delta <= 0 or rng.random() < math.exp(-delta / temperature):
                current = candidate
                current_size = size
                best = min(best, (size, tuple(sorted(candidate))))
            temperature *= self.config.cooling
        return best


@time_function
def heuristic_profile(g: FiniteGraph, t: Truncation, config: SearchConfig,
                      candidates: Sequence[Sequence[int]] = (), jobs: Optional[int] = None) -> IsoProfile:
    """
    Best boundary found for n = 1..n_max by
    (a) greedy and BFS-ball growth from seeds: the truncation root when it lies in the
        region, the lowest-degree region vertex and greedy_seeds vertices drawn with the seed
    (b) annealing chains started from the best set of (a) for each n
    plus any connected candidate sets supplied by the caller.

    Every set considered is connected, so values never undercut the exact connected profile.
    Deterministic for a given SearchConfig.
    """
    config.validate(g, t)
    region = make_vertex_set(g, config.region)
    region_set = set(region)
    profile = IsoProfile()
    if not region:
        return profile

    for candidate in candidates:
        A = make_vertex_set(g, candidate)
        if not A or not set(A) <= region_set or not is_connected_subset(g, A):
            raise ParameterError("Candidate sets must be nonempty, connected and inside the region")
        if len(A) <= config.n_max:
            profile.offer(len(A), len(boundary(g, t, A)), A, HEURISTIC)

    rng = np.random.default_rng(config.seed)
    seeds = set()
    if t.root_index in region_set:
        seeds.add(t.root_index)
    seeds.add(min(region, key=lambda v: (len(g.adjacency[v]), v)))
    draw = min(config.greedy_seeds, len(region))
    if draw:
        seeds.update(int(region[j]) for j in rng.choice(len(region), size=draw, replace=False))

    for s in sorted(seeds):
        for size, A in _greedy_growth(g, region_set, s, config.n_max) + \
                _ball_growth(g, region, region_set, s, config.n_max):
            profile.offer(len(A), size, A, HEURISTIC)

    annealer = _SwapAnnealer(g, region_set, config)
    tasks = [(n, chain) for n in sorted(profile.entries) for chain in range(config.chains)]
    starts = {n: profile[n].witness for n in profile.entries}

    def run(task):
        n, chain = task
        return n, annealer.run(starts[n], n, chain)

    if jobs and jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(run, tasks))
    else:
        results = [run(task) for task in tasks]
    for n, (size, A) in results:
        profile.offer(n, size, A, HEURISTIC)

    logging.info(f"Heuristic profile (seed {config.seed}) over {len(region)} region vertices: {profile.values()}")
    return profile


def search_profile(g: FiniteGraph, t: Truncation, config: SearchConfig, budget: Optional[int] = None,
                   candidates: Sequence[Sequence[int]] = (), jobs: Optional[int] = None) -> IsoProfile:
    """Dispatch on config.mode"""
    config.validate(g, t)
    if config.mode == "heuristic":
        return heuristic_profile(g, t, config, candidates=candidates, jobs=jobs)
    return exact_profile(g, t, config.region, config.n_max, mode=config.mode, budget=budget, jobs=jobs)
