"""
Vertex and graph representations, truncation discipline, BFS, balls, boundaries
and distance histograms.

Vertices of an infinite family are only ever touched through a GraphOracle.
materialize() turns the ball B(o, R_t) into a FiniteGraph whose indices follow the
canonical encoding order, and records a Truncation so every later computation
can check that it is exact in the full graph.
"""
import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from config import load_config
from modules.errors import MarginError, ParameterError, ResourceLimitError, DisconnectedGraphError
from utils.memory_cache import MemoryAwareCache
from utils.performance_monitoring import time_function, log_memory_usage

config = load_config()
TRUNCATION_SETTINGS = config["TRUNCATION_SETTINGS"]
BALL_CACHE_CONFIG = config["CACHE_CONFIG"]["ball_cache"]

# A vertex set is a strictly increasing tuple of indices into a FiniteGraph
VertexSet = Tuple[int, ...]

BOUNDARY_MODE = "boundary"
CERTIFICATE_MODE = "certificate"


class GraphOracle:
    """
    Pure neighbor function over canonical vertex values.

    Subclasses implement _neighbors(), encode() and decode(). neighbors() returns
    the list sorted by encoding so every traversal breaks ties the same way.
    """
    family = "oracle"
    degree: Optional[int] = None  # uniform degree m, present iff the graph is regular
    finite = False

    def _neighbors(self, v) -> Iterable[Any]:
        raise NotImplementedError

    def neighbors(self, v) -> Tuple[Any, ...]:
        return tuple(sorted(self._neighbors(v), key=self.encode))

    def encode(self, v) -> str:
        raise NotImplementedError

    def decode(self, text: str):
        raise NotImplementedError

    def root(self):
        raise NotImplementedError

    def sphere_sizes(self, v, r_max: int) -> Optional[List[int]]:
        """|S(v, r)| for r = 0..r_max when the family counts them without a BFS, None otherwise"""
        return None

    def __repr__(self):
        return f"{type(self).__name__}(family={self.family!r}, degree={self.degree})"


class FiniteGraph:
    """
    Materialized graph with dense indices 0..n-1 assigned in encoding order.
    Immutable after construction; BFS results are cached per graph.
    """

    def __init__(self, vertices: Sequence[Any], encodings: Sequence[str],
                 adjacency: Sequence[Sequence[int]], family: str = "finite",
                 decode=None):
        """
        Parameters:
        - vertices: vertex values, already sorted by encoding
        - encodings: canonical encoding of each vertex, strictly increasing
        - adjacency: neighbor indices per vertex
        - family: family tag of the oracle this graph came from
        - decode: optional encoding -> vertex function for reading vertex sets
        """
        self.vertices = list(vertices)
        self.encodings = list(encodings)
        self.adjacency = tuple(tuple(sorted(set(neighbors))) for neighbors in adjacency)
        self.family = family
        self._decode = decode
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.encoding_index = {e: i for i, e in enumerate(self.encodings)}
        self.degrees = np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)
        self._ball_cache = MemoryAwareCache(
            name=f"ball_cache[{family}]",
            maxsize=BALL_CACHE_CONFIG["max_size"],
            max_memory_mb=BALL_CACHE_CONFIG["max_memory_mb"]
        )

        if len(self.vertices) != len(self.encodings) or len(self.vertices) != len(self.adjacency):
            raise ParameterError("vertices, encodings and adjacency must have equal length")
        if len(self.index) != len(self.vertices) or len(self.encoding_index) != len(self.encodings):
            raise ParameterError("vertex encodings must be unique")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def uniform_degree(self) -> Optional[int]:
        if self.n == 0:
            return None
        low = int(self.degrees.min())
        return low if low == self.max_degree else None

    def index_of(self, v) -> int:
        """Index of a vertex value, raising ParameterError when it is not materialized"""
        try:
            return self.index[v]
        except (KeyError, TypeError):
            raise ParameterError(f"Vertex {v!r} is not materialized in this graph")

    def index_of_encoding(self, text: str) -> int:
        try:
            return self.encoding_index[text]
        except KeyError:
            raise ParameterError(f"Vertex '{text}' is not materialized in this graph")

    def decode(self, text: str):
        if self._decode is None:
            return self.vertices[self.index_of_encoding(text)]
        return self._decode(text)

    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def edges(self) -> List[Tuple[int, int]]:
        """Undirected edges (i, j) with i < j, sorted"""
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    @classmethod
    def from_nx(cls, graph: nx.Graph, family: str = "finite", decode=None) -> "FiniteGraph":
        """FiniteGraph over a networkx graph whose nodes are encoding strings"""
        encodings = sorted(graph.nodes)
        index = {e: i for i, e in enumerate(encodings)}
        adjacency = [[index[w] for w in graph.adj[e]] for e in encodings]
        return cls(encodings, encodings, adjacency, family=family, decode=decode)

    @cached_property
    def nx_graph(self) -> nx.Graph:
        """networkx view on the indices 0..n-1, built on first use"""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    def vertex_set(self, vertices: Iterable[Any]) -> VertexSet:
        """VertexSet holding the given vertex values"""
        return make_vertex_set(self, [self.index_of(v) for v in vertices])

    def encode_set(self, A: Sequence[int]) -> List[str]:
        return [self.encodings[i] for i in A]

    def __repr__(self):
        return f"FiniteGraph(family={self.family!r}, n={self.n}, edges={self.edge_count()})"


@dataclass(frozen=True)
class Truncation:
    """
    Records how a FiniteGraph sits inside its oracle graph.

    dist[i] is the distance from the root to vertex i (all <= radius). A vertex at
    distance < radius has all of its oracle neighbors materialized. complete is
    True when no materialized vertex misses a neighbor, in which case every
    computation on the graph is exact.
    """
    root: Any
    root_index: int
    radius: int
    dist: np.ndarray
    complete: bool = False

    def depth(self, i: int) -> int:
        return int(self.dist[i])

    def max_depth(self, A: Iterable[int]) -> int:
        A = list(A)
        if not A:
            return -1
        return int(self.dist[np.asarray(A, dtype=np.int64)].max())

    def frontier(self) -> VertexSet:
        """Vertices at distance exactly radius (empty when complete)"""
        if self.complete:
            return tuple()
        return tuple(int(i) for i in np.flatnonzero(self.dist == self.radius))


def make_vertex_set(g: FiniteGraph, indices: Iterable[int]) -> VertexSet:
    """Sorted, de-duplicated, validated VertexSet"""
    A = tuple(sorted(set(int(i) for i in indices)))
    if A and (A[0] < 0 or A[-1] >= g.n):
        raise ParameterError(f"Vertex index out of range for a graph with {g.n} vertices")
    return A


@time_function
def materialize(oracle: GraphOracle, o, R_t: int, max_vertices: Optional[int] = None) -> Tuple[FiniteGraph, Truncation]:
    """
    Materialize exactly the ball B(o, R_t) of an oracle graph

    Parameters:
    - oracle: neighbor oracle of the family
    - o: root vertex
    - R_t: truncation radius (>= 0)
    - max_vertices: resource cap, defaults to TRUNCATION_SETTINGS["MAX_VERTICES"]

    Returns (FiniteGraph, Truncation).
    """
    if R_t < 0:
        raise ParameterError(f"Truncation radius must be >= 0, got {R_t}")
    limit = max_vertices or TRUNCATION_SETTINGS["MAX_VERTICES"]

    distance = {o: 0}
    order = [o]
    neighbor_cache = {}
    queue = deque([o])
    while queue:
        v = queue.popleft()
        d = distance[v]
        if d == R_t:
            continue
        nbrs = oracle.neighbors(v)
        neighbor_cache[v] = nbrs
        for w in nbrs:
            if w not in distance:
                distance[w] = d + 1
                order.append(w)
                queue.append(w)
                if len(order) > limit:
                    raise ResourceLimitError(len(order), limit, R_t)

    # Frontier vertices keep only their materialized neighbors
    complete = True
    for v in order:
        if v in neighbor_cache:
            continue
        nbrs = oracle.neighbors(v)
        kept = tuple(w for w in nbrs if w in distance)
        if len(kept) != len(nbrs):
            complete = False
        neighbor_cache[v] = kept

    encoded = sorted((oracle.encode(v), v) for v in order)
    vertices = [v for _, v in encoded]
    encodings = [e for e, _ in encoded]
    index = {v: i for i, v in enumerate(vertices)}
    adjacency = [[index[w] for w in neighbor_cache[v]] for v in vertices]
    dist = np.array([distance[v] for v in vertices], dtype=np.int64)

    g = FiniteGraph(vertices, encodings, adjacency, family=oracle.family, decode=oracle.decode)
    t = Truncation(root=o, root_index=index[o], radius=R_t, dist=dist, complete=complete)

    logging.info(f"Materialized {oracle.family} ball of radius {R_t}: {g.n} vertices, "
                 f"{g.edge_count()} edges{' (complete)' if complete else ''}")
    if g.n >= TRUNCATION_SETTINGS["MEMORY_LOG_THRESHOLD"]:
        log_memory_usage(f"materialize {oracle.family} R_t={R_t}")
    return g, t


def complete_truncation(g: FiniteGraph, root_index: int = 0) -> Truncation:
    """Truncation for a graph that is known to be the whole graph (e.g. read from a file)"""
    if g.n == 0:
        return Truncation(root=None, root_index=-1, radius=0, dist=np.zeros(0, dtype=np.int64), complete=True)
    dist = bfs_distances(g, [root_index])
    radius = int(dist.max()) if dist.size else 0
    return Truncation(root=g.vertices[root_index], root_index=root_index, radius=radius, dist=dist, complete=True)


def bfs_distances(g: FiniteGraph, sources: Iterable[int], max_radius: Optional[int] = None,
                  targets: Optional[Iterable[int]] = None) -> np.ndarray:
    """
    Multi-source BFS over the materialized graph

    Parameters:
    - sources: start indices (distance 0)
    - max_radius: stop expanding beyond this distance
    - targets: stop as soon as all of these have been reached

    Returns an int64 array of distances, -1 for vertices not reached.
    """
    # Plain list while traversing; element access on numpy arrays is slow in a Python loop
    dist = [-1] * g.n
    sources = list(sources)
    queue = deque()
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue.append(s)

    remaining = None
    if targets is not None:
        remaining = set(targets) - set(sources)
        if not remaining:
            return np.array(dist, dtype=np.int64)

    adjacency = g.adjacency
    while queue:
        v = queue.popleft()
        d = dist[v]
        if max_radius is not None and d >= max_radius:
            continue
        for w in adjacency[v]:
            if dist[w] < 0:
                dist[w] = d + 1
                queue.append(w)
                if remaining is not None:
                    remaining.discard(w)
                    if not remaining:
                        return np.array(dist, dtype=np.int64)
    return np.array(dist, dtype=np.int64)


def _ball_layers(g: FiniteGraph, i: int, r_max: int) -> np.ndarray:
    """Sphere sizes |S(i, r)| for r = 0..r_max, cached per graph"""
    key = (i, r_max)
    cached = g._ball_cache.get(key)
    if cached is not None:
        return cached
    dist = bfs_distances(g, [i], max_radius=r_max)
    reached = dist[dist >= 0]
    layers = np.bincount(reached, minlength=r_max + 1)[:r_max + 1]
    g._ball_cache.set(key, layers)
    return layers


def check_ball_margin(t: Truncation, i: int, r: int, vertex_label: str = None):
    """Raise MarginError unless B(i, r) computed in the truncation equals the true ball"""
    if t.complete:
        return
    depth = t.depth(i)
    if depth + r > t.radius:
        label = vertex_label if vertex_label is not None else str(i)
        raise MarginError(
            f"Ball B({label}, {r}) is not exact: dist(o, v) + r = {depth + r} exceeds R_t = {t.radius}",
            vertex=label, needed=depth + r, radius=t.radius
        )


def ball_sizes_at(g: FiniteGraph, t: Truncation, i: int, r_max: int) -> List[int]:
    """ball_sizes() for a vertex given by index"""
    if r_max < 0:
        raise ParameterError(f"r_max must be >= 0, got {r_max}")
    check_ball_margin(t, i, r_max, g.encodings[i])
    return [int(x) for x in np.cumsum(_ball_layers(g, i, r_max))]


def ball_sizes(g: FiniteGraph, t: Truncation, v, r_max: int) -> List[int]:
    """
    |B(v, r)| for r = 0..r_max

    Raises MarginError unless dist(o, v) + r_max <= R_t (or the truncation is complete).
    """
    return ball_sizes_at(g, t, g.index_of(v), r_max)


def ball_members(g: FiniteGraph, t: Truncation, i: int, r: int) -> VertexSet:
    """Indices of B(i, r), margin-checked"""
    check_ball_margin(t, i, r, g.encodings[i])
    dist = bfs_distances(g, [i], max_radius=r)
    return tuple(int(x) for x in np.flatnonzero(dist >= 0))


def interior_check(t: Truncation, A: Iterable[int], mode: str = BOUNDARY_MODE,
                   extra: Iterable[int] = ()) -> bool:
    """
    Whether the margin rule for the requested mode holds

    boundary mode: every vertex of A is at distance <= R_t - 1, so all of its neighbors
    are materialized. certificate mode: R_t >= 3 s with s the largest root distance over
    A and extra, so truncated BFS distances between those vertices are true distances.
    """
    if mode not in (BOUNDARY_MODE, CERTIFICATE_MODE):
        raise ParameterError(f"Unknown interior mode '{mode}'")
    if t.complete:
        return True
    vertices = list(A) + list(extra)
    if not vertices:
        return True
    s = t.max_depth(vertices)
    if mode == BOUNDARY_MODE:
        return s <= t.radius - 1
    return t.radius >= 3 * s


def require_interior(t: Truncation, A: Iterable[int], mode: str = BOUNDARY_MODE, extra: Iterable[int] = ()):
    """interior_check() that raises MarginError instead of returning False"""
    A = list(A)
    extra = list(extra)
    if not interior_check(t, A, mode, extra):
        s = t.max_depth(A + extra)
        if mode == BOUNDARY_MODE:
            message = f"Set touches the truncation frontier: max dist {s} > R_t - 1 = {t.radius - 1}"
            needed = s + 1
        else:
            message = f"Certificate margin fails: 3*s = {3 * s} exceeds R_t = {t.radius}"
            needed = 3 * s
        raise MarginError(message, needed=needed, radius=t.radius)


def boundary(g: FiniteGraph, t: Truncation, A: Sequence[int]) -> VertexSet:
    """
    Vertex boundary: vertices outside A with a neighbor in A

    Raises MarginError if A touches the truncation frontier.
    """
    A = make_vertex_set(g, A)
    require_interior(t, A, BOUNDARY_MODE)
    members = set(A)
    result = set()
    for v in A:
        for w in g.adjacency[v]:
            if w not in members:
                result.add(w)
    return tuple(sorted(result))


def distance_histogram(g: FiniteGraph, t: Truncation, A: Sequence[int], u) -> Dict[int, int]:
    """
    m_r = |{v in A : d(v, u) = r}| for every r with m_r > 0

    Parameters:
    - A: VertexSet
    - u: VertexId of the base vertex

    Raises MarginError unless R_t >= 3 s, s the largest root distance over A and u.
    """
    A = make_vertex_set(g, A)
    ui = g.index_of(u)
    return distance_histogram_at(g, t, A, ui)


def distance_histogram_at(g: FiniteGraph, t: Truncation, A: VertexSet, ui: int) -> Dict[int, int]:
    """distance_histogram() for a base vertex given by index"""
    if not A:
        return {}
    require_interior(t, A, CERTIFICATE_MODE, extra=[ui])
    dist = bfs_distances(g, [ui], targets=A)
    values = dist[np.asarray(A, dtype=np.int64)]
    if (values < 0).any():
        raise DisconnectedGraphError(f"Some vertices of A are unreachable from {g.encodings[ui]}")
    counts = np.bincount(values)
    return {int(r): int(m) for r, m in enumerate(counts) if m > 0}


def is_tree(g: FiniteGraph) -> bool:
    """Connected and acyclic"""
    if g.n == 0:
        return False
    return nx.is_tree(g.nx_graph)


def diameter(g: FiniteGraph) -> int:
    """
    Exact diameter, cached per graph.

    Raises DisconnectedGraphError if the graph is disconnected or empty.
    """
    if g.n == 0:
        raise DisconnectedGraphError("The empty graph has no diameter")
    cached = g._ball_cache.get(("diameter",))
    if cached is not None:
        return cached

    if not nx.is_connected(g.nx_graph):
        raise DisconnectedGraphError(f"Graph is disconnected: vertex {g.encodings[0]} does not reach every vertex")
    # Eccentricity bounding visits few sources on trees and vertex-transitive graphs
    best = int(nx.diameter(g.nx_graph, usebounds=True)) if g.n > 1 else 0
    g._ball_cache.set(("diameter",), best)
    logging.debug(f"Diameter of {g!r}: {best}")
    return best


def is_connected_subset(g: FiniteGraph, A: Sequence[int]) -> bool:
    """Whether A induces a connected subgraph (the empty set counts as connected)"""
    A = list(A)
    if len(A) <= 1:
        return True
    return nx.is_connected(g.nx_graph.subgraph(A))


def induced_components(g: FiniteGraph, vertices: Iterable[int]) -> List[VertexSet]:
    """Connected components of the subgraph induced by vertices, ordered by smallest index"""
    members = set(vertices)
    if not members:
        return []
    components = nx.connected_components(g.nx_graph.subgraph(members))
    return sorted(tuple(sorted(component)) for component in components)


def oracle_boundary(oracle: GraphOracle, vertices: Iterable[Any]) -> List[Any]:
    """
    Exact vertex boundary computed straight from the neighbor function.
    Needs no truncation, so it serves sets far from any affordable root.
    """
    members = set(vertices)
    result = set()
    for v in members:
        for w in oracle.neighbors(v):
            if w not in members:
                result.add(w)
    return sorted(result, key=oracle.encode)


def oracle_distances(oracle: GraphOracle, source, targets: Iterable[Any],
                     max_vertices: Optional[int] = None) -> Dict[Any, int]:
    """
    True graph distances from source to each target, by BFS on the oracle itself.
    Stops once every target is reached; raises ResourceLimitError past the vertex cap.
    """
    remaining = set(targets)
    result = {}
    if source in remaining:
        result[source] = 0
        remaining.discard(source)
    limit = max_vertices or TRUNCATION_SETTINGS["MAX_VERTICES"]
    distance = {source: 0}
    queue = deque([source])
    while queue and remaining:
        v = queue.popleft()
        d = distance[v]
        for w in oracle.neighbors(v):
            if w in distance:
                continue
            distance[w] = d + 1
            queue.append(w)
            if w in remaining:
                result[w] = d + 1
                remaining.discard(w)
        if len(distance) > limit:
            raise ResourceLimitError(len(distance), limit, d + 1)
    if remaining:
        raise DisconnectedGraphError(f"{len(remaining)} target(s) unreachable from {oracle.encode(source)}")
    return result


def check_oracle_symmetry(oracle: GraphOracle, vertices: Iterable[Any]) -> List[Tuple[Any, Any]]:
    """
    Problems found among the given vertices: asymmetric edges, self-loops, duplicates
    and neighbor lists that change between calls. Empty list means none.
    """
    problems = []
    for v in vertices:
        nbrs = oracle.neighbors(v)
        if nbrs != oracle.neighbors(v):
            problems.append((v, "impure"))
        if v in nbrs:
            problems.append((v, v))
        if len(set(nbrs)) != len(nbrs):
            problems.append((v, "duplicate"))
        for w in nbrs:
            if v not in oracle.neighbors(w):
                problems.append((v, w))
    return problems
