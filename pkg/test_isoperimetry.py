"""
Tests for boundary ratios, the volume and diameter bounds, Z-certificates,
the warm-up coverage check and the branch-point check
"""
import itertools
import math
from dataclasses import replace

import pytest

from modules.errors import (
    DegenerateFitError, DisconnectedGraphError, MarginError, NotATreeError, OutOfRangeError,
    ParameterError, RangeError, UnverifiedPinchError,
)
from modules.generators import (
    CycleOracle, LamplighterOracle, PathOracle, SubdividedTreeOracle, TorusOracle,
    lamplighter_box,
)
from modules.graph_core import FiniteGraph, ball_members, complete_truncation, materialize
from modules.growth import growth_profile, pinch_fit
from modules.isoperimetry import (
    BOUND_REPORT_COLUMNS, analyze_set, analyze_vertices, babai_szegedy, bound_report,
    branch_point_check, branch_points, ceil_log, certificate_bounds_check, cs_bound, eii_ratio,
    finite_applicability, iso_dimension_fit, oracle_certificate, warmup_check, z_certificate,
)
from modules.search import enum_connected_sets


def test_eii_ratio():
    assert eii_ratio(0, 0) is None
    assert eii_ratio(1, 3) == pytest.approx(3 * math.log(3))


def test_analyze_set_singleton(tree3_ball):
    oracle, g, t = tree3_ball
    analysis = analyze_set(g, t, [t.root_index])
    assert analysis.size == 1
    assert analysis.boundary_size == 3
    assert analysis.eii_ratio == pytest.approx(3 * math.log(3))


def test_lamplighter_box_ratios():
    oracle = LamplighterOracle()
    ratios = {}
    for n in range(2, 9):
        analysis = analyze_vertices(oracle, lamplighter_box(n))
        size = (n + 1) * 2 ** (n + 1)
        assert analysis.size == size
        assert analysis.boundary_size == 2 ** (n + 2)
        assert analysis.eii_ratio == pytest.approx(2 * math.log(2 + size) / (n + 1))
        ratios[n] = analysis.eii_ratio
    assert ratios[2] == pytest.approx(2.172, abs=1e-3)
    assert ratios[8] == pytest.approx(1.875, abs=1e-3)
    # Bounded along the family
    assert max(ratios.values()) <= 1.5 * ratios[8]


def test_ceil_log():
    assert ceil_log(1, 2) == 0
    assert ceil_log(8, 2) == 3
    assert ceil_log(9, 2) == 4
    assert ceil_log(24, 2) == 5
    assert ceil_log(12, 3) == 3


# ======= Volume and diameter bounds =======

@pytest.mark.parametrize("fixture, region_radius", [("lattice2_ball", 4), ("tree4_ball", 2)])
def test_cs_bound_on_every_small_connected_set(request, fixture, region_radius):
    oracle, g, t = request.getfixturevalue(fixture)
    region = ball_members(g, t, t.root_index, region_radius)
    checked = 0
    for n in range(1, 9):
        for A in enum_connected_sets(g, region, n):
            assert analyze_set(g, t, A).boundary_size >= cs_bound(g, t, A, oracle.degree)
            checked += 1
    assert checked > 1000


def test_cs_bound_value(tree3_ball):
    oracle, g, t = tree3_ball
    # phi(2) = 1 at the root of tree(3)
    assert cs_bound(g, t, [t.root_index], 3) == pytest.approx(1 / 12)


def test_cs_bound_rejects_wrong_degree_and_far_radius(tree3_ball):
    oracle, g, t = tree3_ball
    A = g.vertex_set([(), (0,), (1,)])
    with pytest.raises(ParameterError):
        cs_bound(g, t, A, 4)
    with pytest.raises(OutOfRangeError):
        cs_bound(g, t, A, 3, anchor=(0,) * 11)


def test_babai_szegedy_on_small_cycles():
    for n in range(8, 13):
        g, t = materialize(CycleOracle(n), 0, n)
        for size in range(1, (n + 1) // 2):
            for A in itertools.combinations(range(n), size):
                if 2 * size >= n:
                    continue
                assert analyze_set(g, t, A).boundary_size >= babai_szegedy(g, A)


def test_babai_szegedy_on_large_cycles():
    for n in range(13, 21):
        g, t = materialize(CycleOracle(n), 0, n)
        for size in range(1, 7):
            arcs = list(enum_connected_sets(g, range(g.n), size))
            assert len(arcs) == n
            for A in arcs:
                assert analyze_set(g, t, A).boundary_size >= babai_szegedy(g, A)


def test_babai_szegedy_on_torus():
    g, t = materialize(TorusOracle(8), (0, 0), 20)
    assert t.complete
    checked = 0
    for n in range(1, 7):
        for A in enum_connected_sets(g, range(g.n), n):
            assert analyze_set(g, t, A).boundary_size >= babai_szegedy(g, A)
            checked += 1
    # fixed polyominoes of sizes 1..6, each at 64 positions
    assert checked == 64 * (1 + 2 + 6 + 19 + 63 + 216)


def test_babai_szegedy_range_and_connectivity():
    g, t = materialize(CycleOracle(10), 0, 10)
    assert babai_szegedy(g, [0, 1]) == pytest.approx(2 / 6)
    with pytest.raises(RangeError):
        babai_szegedy(g, [])
    with pytest.raises(RangeError):
        babai_szegedy(g, range(5))

    split = FiniteGraph(["a", "b", "c", "d"], ["a", "b", "c", "d"], [[1], [0], [3], [2]])
    with pytest.raises(DisconnectedGraphError):
        babai_szegedy(split, [0])


# ======= Z-certificate =======

def test_certificate_of_tree_root(tree3_ball):
    oracle, g, t = tree3_ball
    cert = z_certificate(g, t, [t.root_index], 2.0, 3.0)
    assert cert.R == 3
    assert cert.boundary == ("r.0", "r.1", "r.2")
    assert cert.histograms == ({1: 1}, {1: 1}, {1: 1})
    assert cert.z == pytest.approx(1.5)
    assert cert.max_z_u == pytest.approx(0.5)
    assert cert.kappa1 == pytest.approx(1 / 18)
    assert cert.beta == pytest.approx(4.0)
    assert cert.identity_ok

    check = certificate_bounds_check(cert, [t.root_index])
    assert check.ok
    assert check.ratio_bound <= len(cert.boundary)


@pytest.mark.parametrize("fixture, constants, max_size, max_depth", [
    ("tree3_ball", (2.0, 3.0), 5, 3),
    ("tree4_ball", (3.0, 2.0), 5, 2),
    ("lamplighter_ball", None, 5, 3),
])
def test_certificates_and_warmup_on_random_sets(request, distinct_connected_sets,
                                                fixture, constants, max_size, max_depth):
    oracle, g, t = request.getfixturevalue(fixture)
    if constants is None:
        estimate = pinch_fit(growth_profile(g, t, [oracle.root()], 10))
        assert estimate.ok
        constants = (estimate.a, estimate.c)
    a, c = constants

    sets = distinct_connected_sets(g, t, 100, max_size, max_depth, seed=5)
    assert len(sets) == 100
    for A in sets:
        cert = z_certificate(g, t, A, a, c)
        assert math.isclose(cert.z, cert.z_direct, rel_tol=1e-9)
        check = certificate_bounds_check(cert, A)
        assert check.lower_ok and check.upper_ok
        assert check.ratio_bound <= len(cert.boundary) + 1e-9
        assert len(cert.boundary) >= check.implied_bound

        warmup = warmup_check(g, t, A, a, c)
        assert warmup.ball_covered and warmup.set_covered
        assert warmup.boundary_size ** 2 * c ** 3 >= len(A)


def test_certificate_negative_control(tree3_ball):
    oracle, g, t = tree3_ball
    A = [t.root_index]
    cert = z_certificate(g, t, A, 2.0, 3.0)
    weakened = replace(cert, c=cert.c / 10)
    assert not certificate_bounds_check(weakened, A).lower_ok


def test_certificate_parallel_matches_serial(tree3_ball):
    oracle, g, t = tree3_ball
    A = ball_members(g, t, t.root_index, 1)
    assert z_certificate(g, t, A, 2.0, 3.0, jobs=3) == z_certificate(g, t, A, 2.0, 3.0)


def test_oracle_certificate_matches_truncation(tree3_ball, tree3):
    oracle, g, t = tree3_ball
    vertices = [(), (0,), (0, 1)]
    local = z_certificate(g, t, g.vertex_set(vertices), 2.0, 3.0)
    remote = oracle_certificate(tree3, vertices, 2.0, 3.0)
    assert remote.boundary == local.boundary
    assert remote.z == pytest.approx(local.z)
    assert remote.z_u == pytest.approx(local.z_u)


def test_certificate_errors(tree3_ball, tree3):
    oracle, g, t = tree3_ball
    with pytest.raises(UnverifiedPinchError) as excinfo:
        z_certificate(g, t, [t.root_index], 2.0, 1.0)
    assert excinfo.value.violations
    with pytest.raises(ParameterError):
        z_certificate(g, t, [t.root_index], 1.0, 3.0)
    with pytest.raises(ParameterError):
        z_certificate(g, t, [], 2.0, 3.0)

    small, small_t = materialize(tree3, tree3.root(), 6)
    with pytest.raises(MarginError):
        z_certificate(small, small_t, small.vertex_set([(0, 1)]), 2.0, 3.0)

    cert = z_certificate(g, t, [t.root_index], 2.0, 3.0)
    with pytest.raises(ParameterError):
        certificate_bounds_check(cert, [0, 1])


# ======= Warm-up coverage =======

def test_warmup_on_tree_ball(tree3_ball):
    oracle, g, t = tree3_ball
    A = ball_members(g, t, t.root_index, 2)
    report = warmup_check(g, t, A, 2.0, 3.0)
    assert report.v_star == "r"
    assert report.r == 3
    assert report.boundary_size == 12
    assert report.ok
    assert report.quantity == pytest.approx(12 ** 2 * 27 / 10)


def test_warmup_on_lamplighter_box(lamplighter_ball):
    oracle, g, t = lamplighter_ball
    A = g.vertex_set(lamplighter_box(2))
    report = warmup_check(g, t, A, 1.618, 2.0)
    assert report.r == 2
    assert report.v_star == "1|"
    assert report.boundary_size == 16
    assert report.set_covered


def test_warmup_needs_margin(tree3):
    g, t = materialize(tree3, tree3.root(), 5)
    A = ball_members(g, t, t.root_index, 2)
    with pytest.raises(MarginError):
        warmup_check(g, t, A, 2.0, 3.0)


def test_warmup_rejects_whole_component():
    g = FiniteGraph(["a", "b"], ["a", "b"], [[1], [0]])
    t = complete_truncation(g)
    with pytest.raises(ParameterError):
        warmup_check(g, t, [0, 1], 2.0, 3.0)


# ======= Dimension fit and finite regime =======

def test_iso_dimension_of_lattice_balls(lattice2_ball):
    oracle, g, t = lattice2_ball
    pairs = []
    for r in range(3, 9):
        analysis = analyze_set(g, t, ball_members(g, t, t.root_index, r))
        assert analysis.boundary_size == 4 * (r + 1)
        pairs.append((analysis.size, analysis.boundary_size))
    assert 1.8 <= iso_dimension_fit(pairs) <= 2.2


def test_iso_dimension_of_tree_balls():
    pairs = [(3 * 2 ** r - 2, 3 * 2 ** (r + 1)) for r in range(4, 11)]
    assert iso_dimension_fit(pairs) > 20


def test_iso_dimension_degenerate():
    with pytest.raises(DegenerateFitError):
        iso_dimension_fit([(1, 3), (4, 6)])
    with pytest.raises(DegenerateFitError):
        iso_dimension_fit([(1, 3), (4, 6), (4, 7)])


def test_finite_applicability():
    assert finite_applicability(2.0, 3.0, 12) == 682
    assert finite_applicability(3.0, 2.0, 9) == 4920
    with pytest.raises(ParameterError):
        finite_applicability(2.0, 3.0, 0)


# ======= Branch points =======

def test_branch_points_of_regular_tree(tree3):
    g, t = materialize(tree3, tree3.root(), 6)
    points = branch_points(g, t)
    assert len(points) == 3 * 2 ** 5 - 2
    result = branch_point_check(g, t, 2)
    assert result.holds
    assert result.density == 1.0
    assert result.longest_residual == 0


def test_branch_points_of_path():
    g, t = materialize(PathOracle(20), 0, 10)
    assert branch_points(g, t) == []
    assert not branch_point_check(g, t, 10).holds
    assert branch_point_check(g, t, 10).witness == tuple(str(v) for v in range(10))
    assert branch_point_check(g, t, 11).holds


@pytest.mark.parametrize("k, radius", [(3, 4), (3, 10), (5, 6)])
def test_subdivided_tree_branch_check(k, radius):
    oracle = SubdividedTreeOracle(k)
    g, t = materialize(oracle, oracle.root(), radius)
    assert branch_point_check(g, t, k).holds
    failed = branch_point_check(g, t, k - 1)
    assert not failed.holds
    assert len(failed.witness) == k - 1
    assert failed.longest_residual == k - 1


def test_branch_check_needs_tree():
    g, t = materialize(CycleOracle(6), 0, 6)
    with pytest.raises(NotATreeError):
        branch_point_check(g, t, 3)
    assert branch_points(g, t) == []


# ======= Aggregated report =======

def test_bound_report_on_tree(tree3_ball):
    oracle, g, t = tree3_ball
    report = bound_report(g, t, [t.root_index], "root", m=3, pinch=(2.0, 3.0))
    assert report.notes == ()
    assert report.bs is None
    assert report.warmup.ok
    assert report.checks_passed
    row = report.csv_row()
    assert len(row) == len(BOUND_REPORT_COLUMNS)
    assert row[:3] == ("root", 1, 3)


def test_bound_report_on_cycle():
    g, t = materialize(CycleOracle(10), 0, 10)
    report = bound_report(g, t, [0, 1], "arc", m=2)
    assert report.bs == pytest.approx(2 / 6)
    assert report.cs == pytest.approx(2 / (4 * 2 * 2))
    assert report.certificate is None
    assert report.checks_passed


def test_bound_report_notes_failed_preconditions(tree3_ball):
    oracle, g, t = tree3_ball
    report = bound_report(g, t, [t.root_index], "root", pinch=(2.0, 1.0))
    assert report.certificate is None
    assert any(note.startswith("certificate:") for note in report.notes)


def test_bound_report_propagates_frontier(tree3):
    g, t = materialize(tree3, tree3.root(), 2)
    with pytest.raises(MarginError):
        bound_report(g, t, list(t.frontier()))
