"""
Isoperimetric quantities of vertex sets.

- SetAnalysis: |A|, |dA| and the log-ratio |dA| log(2 + |A|) / |A|
- the volume bound |A| / (4 m phi(2|A|)) and the finite-graph bound |A| / (1 + diam)
- the Z-certificate Z = sum over v in A, u in dA of a^-d(v,u), with explicit constants
  kappa1 = 1 / (2 c^2) and beta = c (ceil(log_a |A|) + 1) + 1 / (a - 1)
- the two-dimensional warm-up coverage check
- dimension fit, finite-regime threshold and the tree branch-point check
"""
import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from config import load_config
from modules.errors import (
    DegenerateFitError, DisconnectedGraphError, MarginError,
    NotATreeError, OutOfRangeError, ParameterError, RangeError, UnverifiedPinchError,
)
from modules.graph_core import (
    CERTIFICATE_MODE, FiniteGraph, GraphOracle, Truncation,
    ball_members, bfs_distances, boundary, check_ball_margin, diameter,
    distance_histogram_at, induced_components, is_tree, make_vertex_set,
    oracle_boundary, oracle_distances, require_interior,
)
from modules.growth import LOWER, UPPER, oracle_pinch_verify, phi_at, verify_indices
from utils.performance_monitoring import time_function

config = load_config()
CERTIFICATE_SETTINGS = config["CERTIFICATE_SETTINGS"]


# ======= Set analysis =======

def eii_ratio(size: int, boundary_size: int) -> Optional[float]:
    """|dA| log(2 + |A|) / |A|, None for the empty set"""
    if size == 0:
        return None
    return boundary_size * math.log(2 + size) / size


@dataclass(frozen=True)
class SetAnalysis:
    """
    A set and its vertex boundary. A and boundary are VertexSets for sets analyzed
    in a truncation, encoded vertices (in encoding order) for oracle-level analysis.
    """
    A: Tuple[Any, ...]
    boundary: Tuple[Any, ...]

    @property
    def size(self) -> int:
        return len(self.A)

    @property
    def boundary_size(self) -> int:
        return len(self.boundary)

    @property
    def eii_ratio(self) -> Optional[float]:
        return eii_ratio(self.size, self.boundary_size)


def analyze_set(g: FiniteGraph, t: Truncation, A: Sequence[int]) -> SetAnalysis:
    """
    Boundary and log-ratio of A; raises MarginError if A touches the truncation frontier
    """
    A = make_vertex_set(g, A)
    return SetAnalysis(A=A, boundary=boundary(g, t, A))


def analyze_vertices(oracle: GraphOracle, vertices: Iterable[Any]) -> SetAnalysis:
    """SetAnalysis straight from the oracle, for sets too far out for a truncation"""
    members = sorted(set(vertices), key=oracle.encode)
    dA = oracle_boundary(oracle, members)
    return SetAnalysis(A=tuple(oracle.encode(v) for v in members),
                       boundary=tuple(oracle.encode(u) for u in dA))


# ======= Volume and diameter bounds =======

def cs_bound(g: FiniteGraph, t: Truncation, A: Sequence[int], m: int, anchor=None) -> float:
    """
    |A| / (4 m phi(2|A|)), phi anchored at the truncation root unless anchor is given

    Raises ParameterError if m is not the anchor's degree, OutOfRangeError when
    phi(2|A|) is beyond the truncation.
    """
    A = make_vertex_set(g, A)
    if m is None or m < 1:
        raise ParameterError(f"The volume bound needs a regular graph of degree m >= 1, got m={m}")
    i = t.root_index if anchor is None else g.index_of(anchor)
    if t.complete or t.depth(i) < t.radius:
        if len(g.adjacency[i]) != m:
            raise ParameterError(f"Anchor {g.encodings[i]} has degree {len(g.adjacency[i])}, not m={m}")
    radius = phi_at(g, t, i, 2 * len(A))
    return len(A) / (4 * m * radius)


def babai_szegedy(g: FiniteGraph, A: Sequence[int]) -> float:
    """
    |A| / (1 + diam G) for a finite connected graph, stated for 0 < |A| < |V|/2

    Raises RangeError outside that range and DisconnectedGraphError for disconnected graphs.
    """
    A = make_vertex_set(g, A)
    if not 0 < len(A) or not 2 * len(A) < g.n:
        raise RangeError(f"|A| = {len(A)} is outside 0 < |A| < |V|/2 = {g.n / 2}")
    return len(A) / (1 + diameter(g))


# ======= Z-certificate =======

def ceil_log(value: float, base: float) -> int:
    """Smallest integer k >= 0 with base^k >= value, for value >= 1"""
    if value <= 1:
        return 0
    k = max(0, math.ceil(math.log(value) / math.log(base)))
    while k > 0 and base ** (k - 1) >= value:
        k -= 1
    while base ** k < value:
        k += 1
    return k


def _validate_constants(a: float, c: float):
    if not a > 1:
        raise ParameterError(f"Base a must be > 1, got {a}")
    if not c >= 1:
        raise ParameterError(f"Pinch constant c must be >= 1, got {c}")


@dataclass(frozen=True)
class Certificate:
    """
    Z-certificate of a set A for pinch constants (a, c).

    boundary, z_u and histograms are aligned: histograms[j] maps r to the number of
    vertices of A at distance r from boundary[j], and z_u[j] = sum_r m_r a^-r.
    z_direct and z_u_direct are the same sums taken vertex by vertex.
    """
    a: float
    c: float
    R: int
    size: int
    boundary: Tuple[str, ...]
    z: float
    z_u: Tuple[float, ...]
    histograms: Tuple[Dict[int, int], ...]
    z_direct: float
    z_u_direct: Tuple[float, ...]

    @property
    def kappa1(self) -> float:
        return 1 / (2 * self.c ** 2)

    @property
    def beta(self) -> float:
        return self.c * (ceil_log(self.size, self.a) + 1) + 1 / (self.a - 1)

    @property
    def max_z_u(self) -> float:
        return max(self.z_u) if self.z_u else 0.0

    @property
    def identity_ok(self) -> bool:
        tol = CERTIFICATE_SETTINGS["REL_TOL"]
        if not math.isclose(self.z, self.z_direct, rel_tol=tol):
            return False
        return all(math.isclose(x, y, rel_tol=tol) for x, y in zip(self.z_u, self.z_u_direct))

    def report_items(self) -> List[Tuple[str, Any]]:
        return [
            ("a", self.a),
            ("c", self.c),
            ("R", self.R),
            ("size", self.size),
            ("boundary_size", len(self.boundary)),
            ("Z", self.z),
            ("Z_direct", self.z_direct),
            ("max_Z_u", self.max_z_u),
            ("kappa1", self.kappa1),
            ("beta", self.beta),
            ("identity_ok", self.identity_ok),
        ]


@dataclass(frozen=True)
class BoundsCheck:
    lower_ok: bool
    upper_ok: bool
    lower_slack: float      # Z - kappa1 |A|
    upper_slack: float      # beta - max_u Z(u)
    ratio_bound: float      # Z / max_u Z(u), never above |dA|
    implied_bound: float    # kappa1 |A| / beta
    boundary_ok: bool       # |dA| >= implied_bound

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok and self.boundary_ok


def _assemble_certificate(a, c, R, size, labels, histograms, direct_rows) -> Certificate:
    """direct_rows[j] lists a^-d(v, u_j) over v in A"""
    z_u = tuple(math.fsum(m * a ** -r for r, m in sorted(hist.items())) for hist in histograms)
    z_u_direct = tuple(math.fsum(row) for row in direct_rows)
    cert = Certificate(
        a=a, c=c, R=R, size=size, boundary=tuple(labels),
        z=math.fsum(z_u), z_u=z_u, histograms=tuple(histograms),
        z_direct=math.fsum(z_u_direct), z_u_direct=z_u_direct,
    )
    if not cert.identity_ok:
        logging.warning(f"Z identity off: histogram sum {cert.z!r} vs direct sum {cert.z_direct!r}")
    return cert


@time_function
def z_certificate(g: FiniteGraph, t: Truncation, A: Sequence[int], a: float, c: float,
                  jobs: Optional[int] = None) -> Certificate:
    """
    Build the Z-certificate of A inside a truncation

    R = ceil(log_a(2 c |A|)). The lower pinch bound is verified at every vertex of A
    and the upper bound at every boundary vertex, for r = 1..R.

    Raises:
    - MarginError if the 3 s rule fails for A and its boundary, or a ball of radius R is not exact
    - UnverifiedPinchError if (a, c) fail on the needed radii
    """
    _validate_constants(a, c)
    A = make_vertex_set(g, A)
    if not A:
        raise ParameterError("The certificate needs a nonempty set")
    dA = boundary(g, t, A)
    require_interior(t, A, CERTIFICATE_MODE, extra=dA)

    R = ceil_log(2 * c * len(A), a)
    violations = verify_indices(g, t, a, c, R, A, LOWER) + verify_indices(g, t, a, c, R, dA, UPPER)
    if violations:
        raise UnverifiedPinchError(
            f"Pinch constants a={a}, c={c} fail {len(violations)} check(s) on radii 1..{R}", violations
        )

    def histogram(u):
        return distance_histogram_at(g, t, A, u)

    if jobs and jobs > 1 and len(dA) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            histograms = list(executor.map(histogram, dA))
    else:
        histograms = [histogram(u) for u in dA]

    # Independent pass: BFS from each v in A
    position = {u: j for j, u in enumerate(dA)}
    direct_rows = [[] for _ in dA]
    dA_array = np.asarray(dA, dtype=np.int64)
    for v in A:
        dist = bfs_distances(g, [v], targets=dA)
        for u, d in zip(dA, dist[dA_array] if dA else []):
            direct_rows[position[u]].append(a ** -int(d))

    cert = _assemble_certificate(a, c, R, len(A), g.encode_set(dA), histograms, direct_rows)
    logging.info(f"Certificate |A|={len(A)} |dA|={len(dA)} R={R}: Z={cert.z:.6g}, max Z(u)={cert.max_z_u:.6g}")
    return cert


@time_function
def oracle_certificate(oracle: GraphOracle, vertices: Iterable[Any], a: float, c: float) -> Certificate:
    """
    Z-certificate computed on the oracle itself: distances by oracle BFS and pinch
    verification through per-vertex truncations. No margin rule is needed.
    """
    _validate_constants(a, c)
    members = sorted(set(vertices), key=oracle.encode)
    if not members:
        raise ParameterError("The certificate needs a nonempty set")
    dA = oracle_boundary(oracle, members)

    R = ceil_log(2 * c * len(members), a)
    violations = oracle_pinch_verify(oracle, a, c, R, members, LOWER) + \
        oracle_pinch_verify(oracle, a, c, R, dA, UPPER)
    if violations:
        raise UnverifiedPinchError(
            f"Pinch constants a={a}, c={c} fail {len(violations)} check(s) on radii 1..{R}", violations
        )

    histograms = [dict(sorted(Counter(oracle_distances(oracle, u, members).values()).items())) for u in dA]
    direct_rows = [[] for _ in dA]
    for v in members:
        distances = oracle_distances(oracle, v, dA)
        for j, u in enumerate(dA):
            direct_rows[j].append(a ** -distances[u])

    return _assemble_certificate(a, c, R, len(members), [oracle.encode(u) for u in dA], histograms, direct_rows)


def certificate_bounds_check(cert: Certificate, A: Sequence[Any]) -> BoundsCheck:
    """
    Compare the certificate with its explicit constants:
    lower_ok iff Z >= kappa1 |A|, upper_ok iff max_u Z(u) <= beta.
    """
    if len(A) != cert.size:
        raise ParameterError(f"Certificate was built for |A| = {cert.size}, got a set of size {len(A)}")
    tol = CERTIFICATE_SETTINGS["REL_TOL"]
    lower_target = cert.kappa1 * cert.size
    beta = cert.beta
    max_z = cert.max_z_u
    implied = lower_target / beta
    return BoundsCheck(
        lower_ok=cert.z >= lower_target * (1 - tol),
        upper_ok=max_z <= beta * (1 + tol),
        lower_slack=cert.z - lower_target,
        upper_slack=beta - max_z,
        ratio_bound=cert.z / max_z if max_z > 0 else 0.0,
        implied_bound=implied,
        boundary_ok=len(cert.boundary) >= implied * (1 - tol),
    )


# ======= Warm-up coverage =======

@dataclass(frozen=True)
class WarmupReport:
    v_star: str
    r: int
    size: int
    boundary_size: int
    ball_covered: bool      # B(v*, 2r) inside the union of B(u, r) over u in dA
    set_covered: bool       # A inside the same union
    quantity: float         # |dA|^2 c^3 / |A|
    growth_ok: bool         # |dA| >= a^r / c^2
    volume_ok: bool         # |dA| c a^r >= |A|

    @property
    def ok(self) -> bool:
        return self.ball_covered and self.set_covered

    def report_items(self) -> List[Tuple[str, Any]]:
        return [
            ("v_star", self.v_star),
            ("r", self.r),
            ("size", self.size),
            ("boundary_size", self.boundary_size),
            ("ball_covered", self.ball_covered),
            ("set_covered", self.set_covered),
            ("boundary_sq_c3_over_size", self.quantity),
            ("growth_ok", self.growth_ok),
            ("volume_ok", self.volume_ok),
        ]


@time_function
def warmup_check(g: FiniteGraph, t: Truncation, A: Sequence[int], a: float, c: float) -> WarmupReport:
    """
    Check the two coverage inclusions of the two-dimensional argument

    v* is the vertex of A farthest from dA (lowest encoding on ties) and r its
    distance. Raises MarginError unless B(v*, 2r) and every B(u, r), u in dA, are exact.
    """
    _validate_constants(a, c)
    A = make_vertex_set(g, A)
    if not A:
        raise ParameterError("The warm-up check needs a nonempty set")
    dA = boundary(g, t, A)
    if not dA:
        raise ParameterError("Set has an empty boundary; it is a whole component")

    to_boundary = bfs_distances(g, dA)
    depths = to_boundary[np.asarray(A, dtype=np.int64)]
    r = int(depths.max())
    v_star = A[int(np.argmax(depths))]

    check_ball_margin(t, v_star, 2 * r, g.encodings[v_star])
    for u in dA:
        check_ball_margin(t, u, r, g.encodings[u])

    covered = bfs_distances(g, dA, max_radius=r) >= 0
    ball = ball_members(g, t, v_star, 2 * r)
    ball_covered = bool(covered[np.asarray(ball, dtype=np.int64)].all())
    set_covered = bool(covered[np.asarray(A, dtype=np.int64)].all())

    size = len(A)
    boundary_size = len(dA)
    report = WarmupReport(
        v_star=g.encodings[v_star], r=r, size=size, boundary_size=boundary_size,
        ball_covered=ball_covered, set_covered=set_covered,
        quantity=boundary_size ** 2 * c ** 3 / size,
        growth_ok=boundary_size >= a ** r / c ** 2,
        volume_ok=boundary_size * c * a ** r >= size,
    )
    if not report.ok:
        logging.warning(f"Warm-up coverage failed for |A|={size}: ball={ball_covered}, set={set_covered}")
    return report


# ======= Dimension fit and finite regime =======

def iso_dimension_slope(pairs: Sequence[Tuple[int, int]]) -> float:
    """Least-squares slope of log|dA| against log|A|"""
    if len(pairs) < 3:
        raise DegenerateFitError(f"Need at least 3 (|A|, |dA|) pairs, got {len(pairs)}")
    sizes = np.array([p[0] for p in pairs], dtype=np.float64)
    boundaries = np.array([p[1] for p in pairs], dtype=np.float64)
    if len(set(sizes.tolist())) != len(sizes):
        raise DegenerateFitError("|A| values must be distinct")
    if (sizes <= 0).any() or (boundaries <= 0).any():
        raise DegenerateFitError("Sizes and boundary sizes must be positive to take logarithms")
    slope, _ = np.polyfit(np.log(sizes), np.log(boundaries), 1)
    return float(slope)


def iso_dimension_fit(pairs: Sequence[Tuple[int, int]]) -> float:
    """
    s with |dA| ~ |A|^((s-1)/s): s = 1 / (1 - sigma) for slope sigma < 1, math.inf otherwise
    """
    sigma = iso_dimension_slope(pairs)
    if sigma >= 1:
        return math.inf
    return 1 / (1 - sigma)


def finite_applicability(a: float, c: float, R: int) -> int:
    """
    Largest |A| whose certificate radius ceil(log_a(2 c |A|)) stays within R:
    floor(a^R / (2 c))
    """
    _validate_constants(a, c)
    if R < 1:
        raise ParameterError(f"R must be >= 1, got {R}")
    return int(math.floor(a ** R / (2 * c)))


# ======= Branch points =======

@dataclass(frozen=True)
class BranchCheck:
    holds: bool
    k: int
    branch_points: int
    interior_size: int
    longest_residual: int
    witness: Tuple[str, ...] = ()

    @property
    def density(self) -> float:
        return self.branch_points / self.interior_size if self.interior_size else 0.0

    def report_items(self) -> List[Tuple[str, Any]]:
        return [
            ("k", self.k),
            ("holds", self.holds),
            ("branch_points", self.branch_points),
            ("interior_size", self.interior_size),
            ("branch_point_density", self.density),
            ("longest_residual_path", self.longest_residual),
            ("witness", list(self.witness)),
        ]


def branch_points(g: FiniteGraph, t: Truncation) -> List[int]:
    """
    Vertices at distance < R_t whose removal leaves at least 3 components that
    reach the truncation frontier. A complete truncation has none.
    """
    frontier = set(t.frontier())
    if not frontier:
        return []

    root = t.root_index
    parent = [-1] * g.n
    order = [root]
    for v, w in nx.bfs_edges(g.nx_graph, root):
        parent[w] = v
        order.append(w)

    below = [0] * g.n   # frontier vertices in the subtree hanging below each vertex
    for v in reversed(order):
        if v in frontier:
            below[v] += 1
        if parent[v] >= 0:
            below[parent[v]] += below[v]
    total = below[root]

    result = []
    for v in order:
        if t.depth(v) >= t.radius:
            continue
        reaching = sum(1 for w in g.adjacency[v] if w != parent[v] and below[w] > 0)
        if parent[v] >= 0 and total - below[v] > 0:
            reaching += 1
        if reaching >= 3:
            result.append(v)
    return sorted(result)


def _longest_path(g: FiniteGraph, component: Sequence[int]) -> List[int]:
    """Longest path inside a tree component, by double sweep restricted to it"""
    sub = g.nx_graph.subgraph(component)

    def farthest(start):
        lengths = nx.single_source_shortest_path_length(sub, start)
        # ties break toward the larger index
        return max(lengths, key=lambda v: (lengths[v], v))

    end = farthest(min(component))
    other = farthest(end)
    return nx.shortest_path(sub, other, end)


@time_function
def branch_point_check(g: FiniteGraph, t: Truncation, k: int) -> BranchCheck:
    """
    Whether every path of k vertices in the safe interior (distance <= R_t - 1)
    contains a branch point. Branch points are deleted and every residual component
    must have fewer than k vertices; otherwise the first k vertices of a longest path
    in the first offending component are the witness.

    Raises NotATreeError unless g is a tree.
    """
    if k < 1:
        raise ParameterError(f"Path length k must be >= 1, got {k}")
    if not is_tree(g):
        raise NotATreeError(f"Branch-point check needs a tree; graph has {g.n} vertices and {g.edge_count()} edges")

    points = branch_points(g, t)
    if t.complete:
        interior = list(range(g.n))
    else:
        interior = [i for i in range(g.n) if t.depth(i) <= t.radius - 1]
    point_set = set(points)
    residual = [i for i in interior if i not in point_set]
    components = induced_components(g, residual)

    longest = 0
    witness = ()
    for component in components:
        path = _longest_path(g, component)
        longest = max(longest, len(path))
        if not witness and len(component) >= k:
            witness = tuple(g.encodings[i] for i in path[:k])

    result = BranchCheck(
        holds=not witness, k=k, branch_points=len(points), interior_size=len(interior),
        longest_residual=longest, witness=witness,
    )
    logging.info(f"Branch check k={k}: holds={result.holds}, {len(points)} branch points, "
                 f"longest residual path {longest}")
    return result


# ======= Aggregated report =======

BOUND_REPORT_COLUMNS = (
    "set_id", "size", "boundary_size", "eii_ratio", "cs_bound", "bs_bound",
    "Z", "max_Z_u", "kappa1_size", "beta", "checks_passed",
)


@dataclass(frozen=True)
class BoundReport:
    set_id: str
    analysis: SetAnalysis
    cs: Optional[float] = None
    bs: Optional[float] = None
    certificate: Optional[Certificate] = None
    bounds: Optional[BoundsCheck] = None
    warmup: Optional[WarmupReport] = None
    notes: Tuple[str, ...] = ()

    @property
    def checks_passed(self) -> bool:
        boundary_size = self.analysis.boundary_size
        if self.cs is not None and boundary_size < self.cs:
            return False
        if self.bs is not None and boundary_size < self.bs:
            return False
        if self.certificate is not None and not (self.certificate.identity_ok and self.bounds.ok):
            return False
        if self.warmup is not None and not self.warmup.ok:
            return False
        return True

    def csv_row(self) -> Tuple[Any, ...]:
        cert = self.certificate
        return (
            self.set_id, self.analysis.size, self.analysis.boundary_size, self.analysis.eii_ratio,
            self.cs, self.bs,
            cert.z if cert else None,
            cert.max_z_u if cert else None,
            cert.kappa1 * cert.size if cert else None,
            cert.beta if cert else None,
            self.checks_passed,
        )


def bound_report(g: FiniteGraph, t: Truncation, A: Sequence[int], set_id: str = "A",
                 m: Optional[int] = None, pinch: Optional[Tuple[float, float]] = None,
                 jobs: Optional[int] = None) -> BoundReport:
    """
    Every bound that applies to A. The set analysis is required (MarginError
    propagates); bounds whose preconditions fail are left empty with a note.

    Parameters:
    - m: uniform degree, enables the volume bound
    - pinch: (a, c), enables the certificate and the warm-up check
    """
    analysis = analyze_set(g, t, A)
    A = analysis.A
    notes = []

    cs = None
    if m is not None:
        try:
            cs = cs_bound(g, t, A, m)
        except (OutOfRangeError, ParameterError) as e:
            notes.append(f"cs_bound: {e}")

    bs = None
    if t.complete:
        try:
            bs = babai_szegedy(g, A)
        except (RangeError, DisconnectedGraphError) as e:
            notes.append(f"bs_bound: {e}")

    cert = bounds = warmup = None
    if pinch is not None and A:
        a, c = pinch
        try:
            cert = z_certificate(g, t, A, a, c, jobs=jobs)
            bounds = certificate_bounds_check(cert, A)
        except (MarginError, UnverifiedPinchError) as e:
            notes.append(f"certificate: {e}")
        try:
            warmup = warmup_check(g, t, A, a, c)
        except (MarginError, ParameterError) as e:
            notes.append(f"warmup: {e}")

    for note in notes:
        logging.info(f"Set {set_id}: {note}")
    return BoundReport(set_id=set_id, analysis=analysis, cs=cs, bs=bs, certificate=cert,
                       bounds=bounds, warmup=warmup, notes=tuple(notes))
