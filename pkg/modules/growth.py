"""
Ball-growth profiles, pinched-growth constants and the inverse growth function phi.

All logarithms are natural. Inequalities are checked non-strictly with a relative
tolerance of PINCH_REL_TOL; pairs that hold within EQUALITY_REL_TOL of a bound are
reported as equality cases.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from config import load_config
from modules.errors import DegenerateFitError, MarginError, OutOfRangeError, ParameterError, SchemaError
from modules.graph_core import (
    FiniteGraph, GraphOracle, Truncation, _ball_layers, ball_sizes_at,
    check_ball_margin, materialize,
)
from utils.performance_monitoring import time_function
from storage.reports import read_csv

config = load_config()
GROWTH_SETTINGS = config["GROWTH_SETTINGS"]

LOWER = "lower"
UPPER = "upper"
BOTH = "both"


class Violation(NamedTuple):
    """One failed pinch inequality"""
    vertex: str
    radius: int
    observed: int
    bound: str      # "lower" or "upper"
    limit: float    # a^r / c or c a^r


class EqualityCase(NamedTuple):
    vertex: str
    radius: int
    bound: str


@dataclass(frozen=True)
class GrowthProfile:
    """
    Ball sizes |B(v, r)| for r = 0..r_max, one row per sampled vertex.
    Rows are keyed by vertex encoding and kept in encoding order.
    """
    r_max: int
    vertices: Tuple[str, ...] = ()
    sizes: Tuple[Tuple[int, ...], ...] = ()
    dropped: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.vertices) != len(self.sizes):
            raise ParameterError("GrowthProfile needs one size row per vertex")
        for vertex, row in zip(self.vertices, self.sizes):
            if len(row) != self.r_max + 1:
                raise ParameterError(f"Row for {vertex} has {len(row)} entries, expected {self.r_max + 1}")
            if row and row[0] != 1:
                raise ParameterError(f"|B({vertex}, 0)| must be 1, got {row[0]}")
            if any(b < a for a, b in zip(row, row[1:])):
                raise ParameterError(f"Ball sizes of {vertex} are not nondecreasing")

    def row(self, vertex: str) -> Tuple[int, ...]:
        try:
            return self.sizes[self.vertices.index(vertex)]
        except ValueError:
            raise ParameterError(f"Vertex {vertex} is not in the profile")

    def as_array(self) -> np.ndarray:
        return np.array(self.sizes, dtype=np.float64).reshape(len(self.vertices), self.r_max + 1)

    def truncated(self, r_max: int) -> "GrowthProfile":
        """The same profile restricted to radii 0..r_max"""
        if not 0 <= r_max <= self.r_max:
            raise ParameterError(f"Cannot truncate a profile of r_max {self.r_max} to {r_max}")
        return GrowthProfile(r_max, self.vertices, tuple(row[:r_max + 1] for row in self.sizes), self.dropped)

    def merge(self, other: "GrowthProfile") -> "GrowthProfile":
        """
        Union of two profiles over the same radii. A vertex present in both must have
        identical rows.
        """
        if other.r_max != self.r_max:
            raise ParameterError(f"Cannot merge profiles with r_max {self.r_max} and {other.r_max}")
        rows = dict(zip(self.vertices, self.sizes))
        for vertex, row in zip(other.vertices, other.sizes):
            if vertex in rows and rows[vertex] != row:
                raise ParameterError(f"Profiles disagree on vertex {vertex}")
            rows[vertex] = row
        ordered = sorted(rows)
        dropped = tuple(sorted(set(self.dropped) | set(other.dropped)))
        return GrowthProfile(self.r_max, tuple(ordered), tuple(rows[v] for v in ordered), dropped)

    def csv_rows(self) -> List[Tuple[str, int, int]]:
        """(vertex, r, ball_size) rows"""
        return [(vertex, r, size) for vertex, row in zip(self.vertices, self.sizes) for r, size in enumerate(row)]

    @classmethod
    def from_csv_rows(cls, rows: Iterable[Dict[str, str]]) -> "GrowthProfile":
        """Inverse of csv_rows(), from dicts with keys vertex, r, ball_size"""
        table: Dict[str, Dict[int, int]] = {}
        for row in rows:
            try:
                table.setdefault(row["vertex"], {})[int(row["r"])] = int(row["ball_size"])
            except (KeyError, ValueError):
                raise ParameterError(f"Bad growth row {row}")
        if not table:
            return cls(r_max=0)
        r_max = max(max(radii) for radii in table.values())
        ordered = sorted(table)
        sizes = []
        for vertex in ordered:
            radii = table[vertex]
            if sorted(radii) != list(range(r_max + 1)):
                raise ParameterError(f"Vertex {vertex} does not list every radius 0..{r_max}")
            sizes.append(tuple(radii[r] for r in range(r_max + 1)))
        return cls(r_max, tuple(ordered), tuple(sizes))


GROWTH_COLUMNS = ("vertex", "r", "ball_size")


def read_profile_csv(path: str) -> GrowthProfile:
    """Load a growth CSV written by the growth command"""
    _, header, rows = read_csv(path)
    if tuple(header) != GROWTH_COLUMNS:
        raise SchemaError(f"{path} is not a growth CSV: columns {', '.join(header) or 'none'}")
    profile = GrowthProfile.from_csv_rows(rows)
    if not profile.vertices:
        raise SchemaError(f"{path} has no growth rows")
    return profile


@dataclass(frozen=True)
class PinchEstimate:
    """Fitted base a and pinch constant c, verified on radii 1..r_max of a profile"""
    a: float
    c: float
    r_min: int
    r_max: int
    violations: Tuple[Violation, ...] = ()
    equalities: Tuple[EqualityCase, ...] = ()
    sample_size: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def report_items(self) -> List[Tuple[str, Any]]:
        return [
            ("a", self.a),
            ("log_a", math.log(self.a)),
            ("c", self.c),
            ("radii", f"{self.r_min}..{self.r_max}"),
            ("sample_size", self.sample_size),
            ("violations", len(self.violations)),
            ("equality_cases", len(self.equalities)),
        ]


@dataclass(frozen=True)
class PhiTable:
    """phi(n) at a fixed anchor for several n"""
    anchor: str
    values: Dict[int, int] = field(default_factory=dict)

    def rows(self) -> List[Tuple[int, int]]:
        return sorted(self.values.items())


# ======= Profiles =======

@time_function
def growth_profile(g: FiniteGraph, t: Truncation, sample: Iterable[Any], r_max: int,
                   jobs: Optional[int] = None) -> GrowthProfile:
    """
    Ball-size sequences for each sampled vertex

    Vertices whose balls are not exact up to r_max (dist(o, v) + r_max > R_t) are
    dropped with a warning and listed in the profile's dropped field.

    Parameters:
    - sample: vertex values; duplicates are ignored
    - r_max: largest radius
    - jobs: worker threads for the per-vertex BFS runs
    """
    if r_max < 0:
        raise ParameterError(f"r_max must be >= 0, got {r_max}")
    indices = sorted({g.index_of(v) for v in sample})

    kept = []
    dropped = []
    for i in indices:
        try:
            check_ball_margin(t, i, r_max, g.encodings[i])
            kept.append(i)
        except MarginError as e:
            logging.warning(f"Dropping sample vertex {g.encodings[i]}: {e}")
            dropped.append(g.encodings[i])

    def sizes_for(i):
        return tuple(int(x) for x in np.cumsum(_ball_layers(g, i, r_max)))

    if jobs and jobs > 1 and len(kept) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            rows = list(executor.map(sizes_for, kept))
    else:
        rows = [sizes_for(i) for i in kept]

    logging.info(f"Growth profile: {len(kept)} vertices up to r={r_max}, {len(dropped)} dropped")
    return GrowthProfile(r_max, tuple(g.encodings[i] for i in kept), tuple(rows), tuple(dropped))


@time_function
def oracle_profile(oracle: GraphOracle, sample: Iterable[Any], r_max: int,
                   jobs: Optional[int] = None) -> GrowthProfile:
    """
    Growth profile with one truncation per sample vertex: B(v, r_max) is
    materialized around v itself, so no common root has to cover all samples.
    Families that count their spheres directly skip the materialization.
    """
    if r_max < 0:
        raise ParameterError(f"r_max must be >= 0, got {r_max}")
    unique = {oracle.encode(v): v for v in sample}
    ordered = sorted(unique)

    def sizes_for(encoding):
        layers = oracle.sphere_sizes(unique[encoding], r_max)
        if layers is not None:
            return tuple(int(x) for x in np.cumsum(layers))
        g, t = materialize(oracle, unique[encoding], r_max)
        return tuple(ball_sizes_at(g, t, t.root_index, r_max))

    if jobs and jobs > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            rows = list(executor.map(sizes_for, ordered))
    else:
        rows = [sizes_for(e) for e in ordered]
    return GrowthProfile(r_max, tuple(ordered), tuple(rows))


def stratified_sample(g: FiniteGraph, t: Truncation, r_max: int, extras: Iterable[Any] = ()) -> List[Any]:
    """
    One vertex per distance shell from the root (the lowest encoding in the shell),
    for every shell whose balls are exact up to r_max, plus the given extras.
    """
    if t.complete:
        deepest = int(t.dist.max()) if t.dist.size else -1
    else:
        deepest = t.radius - r_max
    chosen = {}
    for i in range(g.n):
        d = int(t.dist[i])
        if 0 <= d <= deepest and d not in chosen:
            chosen[d] = i
    sample = [g.vertices[chosen[d]] for d in sorted(chosen)]
    if not sample:
        logging.warning(f"No shell of the truncation (R_t={t.radius}) admits exact balls of radius {r_max}")
    for v in extras:
        if v not in sample:
            sample.append(v)
    return sample


# ======= Pinch fitting and verification =======

def check_profile(profile: GrowthProfile, a: float, c: float, R: int,
                  mode: str = BOTH) -> Tuple[List[Violation], List[EqualityCase]]:
    """
    Check c^-1 a^r <= |B(v, r)| <= c a^r for r = 1..R over a profile

    Returns (violations, equality cases) in vertex then radius order.
    """
    if mode not in (BOTH, LOWER, UPPER):
        raise ParameterError(f"Unknown pinch mode '{mode}'")
    if not a > 1:
        raise ParameterError(f"Base a must be > 1, got {a}")
    if not c > 0:
        raise ParameterError(f"Pinch constant c must be > 0, got {c}")
    if R > profile.r_max:
        raise ParameterError(f"Profile only reaches r={profile.r_max}, cannot check up to R={R}")

    tol = GROWTH_SETTINGS["PINCH_REL_TOL"]
    eq_tol = GROWTH_SETTINGS["EQUALITY_REL_TOL"]
    violations = []
    equalities = []
    for vertex, row in zip(profile.vertices, profile.sizes):
        for r in range(1, R + 1):
            observed = row[r]
            power = a ** r
            if mode in (BOTH, LOWER):
                low = power / c
                if observed < low * (1 - tol):
                    violations.append(Violation(vertex, r, observed, LOWER, low))
                elif abs(observed - low) <= eq_tol * low:
                    equalities.append(EqualityCase(vertex, r, LOWER))
            if mode in (BOTH, UPPER):
                high = c * power
                if observed > high * (1 + tol):
                    violations.append(Violation(vertex, r, observed, UPPER, high))
                elif abs(observed - high) <= eq_tol * high:
                    equalities.append(EqualityCase(vertex, r, UPPER))
    return violations, equalities


@time_function
def pinch_fit(profile: GrowthProfile) -> PinchEstimate:
    """
    Fit pinched exponential growth to a profile

    a = exp(slope of the pooled least-squares line of log|B(v, r)| against r over
    r >= 1); c = the exact envelope max(a^r / |B|, |B| / a^r), at least 1. The
    returned estimate therefore verifies on the profile by construction.

    Raises DegenerateFitError without two radii >= 1, without vertices, or when the
    slope is not positive.
    """
    if not profile.vertices:
        raise DegenerateFitError("Cannot fit a profile without vertices")
    if profile.r_max < 2:
        raise DegenerateFitError(f"Need radii 1..r with r >= 2 to fit a slope, profile stops at {profile.r_max}")

    sizes = profile.as_array()[:, 1:]
    radii = np.arange(1, profile.r_max + 1, dtype=np.float64)
    x = np.tile(radii, sizes.shape[0])
    y = np.log(sizes.ravel())
    if np.ptp(y) == 0:
        raise DegenerateFitError("All ball sizes are equal; growth rate a = 1 is not allowed")

    slope, _ = np.polyfit(x, y, 1)
    if slope <= 0:
        raise DegenerateFitError(f"Fitted log-growth slope {slope:.6g} is not positive")
    a = float(math.exp(slope))

    powers = a ** radii
    envelope = np.maximum(powers / sizes, sizes / powers)
    c = float(max(1.0, envelope.max()))

    violations, equalities = check_profile(profile, a, c, profile.r_max)
    logging.info(f"Pinch fit over {len(profile.vertices)} vertices, r=1..{profile.r_max}: a={a:.6f}, c={c:.6f}")
    return PinchEstimate(a=a, c=c, r_min=1, r_max=profile.r_max, violations=tuple(violations),
                         equalities=tuple(equalities), sample_size=len(profile.vertices))


def pinch_verify(g: FiniteGraph, t: Truncation, a: float, c: float, R: int,
                 sample: Iterable[Any], mode: str = BOTH) -> List[Violation]:
    """
    Check the pinch inequalities at every sampled vertex for r = 1..R

    Parameters:
    - sample: vertex values
    - mode: "both", "lower" (for a sample of A) or "upper" (for a sample of its boundary)

    Raises MarginError if some sample vertex has no exact ball of radius R.
    Returns the violation list, empty when every inequality holds.
    """
    return verify_indices(g, t, a, c, R, sorted({g.index_of(v) for v in sample}), mode)


def verify_indices(g: FiniteGraph, t: Truncation, a: float, c: float, R: int,
                   indices: Sequence[int], mode: str = BOTH) -> List[Violation]:
    """pinch_verify() for vertices given by index"""
    if R < 0:
        raise ParameterError(f"R must be >= 0, got {R}")
    for i in indices:
        check_ball_margin(t, i, R, g.encodings[i])
    rows = tuple(tuple(ball_sizes_at(g, t, i, R)) for i in indices)
    profile = GrowthProfile(R, tuple(g.encodings[i] for i in indices), rows)
    violations, _ = check_profile(profile, a, c, R, mode)
    if violations:
        logging.debug(f"Pinch verification with a={a}, c={c}, R={R}: {len(violations)} violations")
    return violations


def oracle_pinch_verify(oracle: GraphOracle, a: float, c: float, R: int,
                        sample: Iterable[Any], mode: str = BOTH) -> List[Violation]:
    """pinch_verify() through per-vertex truncations of radius R"""
    profile = oracle_profile(oracle, sample, R)
    violations, _ = check_profile(profile, a, c, R, mode)
    return violations


# ======= phi =======

def phi(g: FiniteGraph, t: Truncation, v, n: int) -> int:
    """
    phi(n) = inf{r >= 1 : |B(v, r)| >= n}

    Only radii with exact balls (dist(o, v) + r <= R_t) are searched; raises
    OutOfRangeError when none of them reaches n.
    """
    return phi_at(g, t, g.index_of(v), n)


def phi_at(g: FiniteGraph, t: Truncation, i: int, n: int) -> int:
    """phi() for an anchor given by index"""
    if t.complete:
        r_cap = max(g.n, 1)
    else:
        r_cap = t.radius - t.depth(i)
    if r_cap < 1:
        raise OutOfRangeError(f"No exact ball of radius >= 1 around {g.encodings[i]} inside R_t={t.radius}")
    if n <= 1:
        return 1
    sizes = np.cumsum(_ball_layers(g, i, r_cap))
    hits = np.flatnonzero(sizes[1:] >= n)
    if hits.size == 0:
        raise OutOfRangeError(
            f"phi({n}) at {g.encodings[i]} exceeds the certifiable radius {r_cap} "
            f"(|B(v, {r_cap})| = {int(sizes[-1])})"
        )
    return int(hits[0]) + 1


def phi_table(g: FiniteGraph, t: Truncation, v, ns: Iterable[int]) -> PhiTable:
    """phi(n) at anchor v for every requested n; out-of-range values raise"""
    i = g.index_of(v)
    values = {int(n): phi_at(g, t, i, int(n)) for n in sorted(set(ns))}
    return PhiTable(anchor=g.encodings[i], values=values)
