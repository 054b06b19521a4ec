import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import clip_above_line, random_polytrapezoid, rasterize_polytrapezoid
from pixrec.errors import DegenerateCurve, DegenerateSegment, NonGenericLine, UndefinedDistance
from pixrec.grid import GridSpec, Pixelation, cubical_measures, rasterize
from pixrec.measures import (
    MeasureReport,
    PLCurve,
    betti,
    boundary_curvature,
    boundary_curves,
    boundary_length,
    contacts,
    euler_characteristic,
    half_plane_chi,
    hausdorff_distance,
    inscribed_polygon_measures,
    measure,
    pl_length,
    pl_total_curvature,
    report_to_csv,
    strip_curvature_formula,
)
from pixrec.recover import Polytrapezoid, Strip, Trapezoid, approximate, default_schedule
from pixrec.shapes import Circle, Disk, ellipse_perimeter, get_shape

SQUARE = PLCurve(((0, 0), (1, 0), (1, 1), (0, 1)), closed=True)


def _box(x0, x1, y0, y1) -> Polytrapezoid:
    return Polytrapezoid((x0, x1), ((Trapezoid(y0, y1, y0, y1),),))


def _ring() -> Polytrapezoid:
    # 3x3 square with the middle unit removed
    return Polytrapezoid(
        (0.0, 1.0, 2.0, 3.0),
        (
            (Trapezoid(0, 3, 0, 3),),
            (Trapezoid(0, 1, 0, 1), Trapezoid(2, 3, 2, 3)),
            (Trapezoid(0, 3, 0, 3),),
        ),
    )


def _union(*polys: Polytrapezoid) -> Polytrapezoid:
    return Polytrapezoid.from_pieces([(xl, xr, t) for P in polys for _, xl, xr, t in P.pieces()])


def _strip_poly(xs, bs, ts) -> Polytrapezoid:
    return Polytrapezoid.from_pieces(Strip(tuple(xs), tuple(bs), tuple(ts)).trapezoids())


# ---------------------------------------------------------------------------
# PL curves


def test_pl_length_examples():
    assert pl_length(SQUARE) == 4.0
    assert pl_length(PLCurve(((0, 0), (3, 4)))) == 5.0
    n = 96
    t = 2 * np.pi * np.arange(n) / n
    ngon = PLCurve(tuple(zip(np.cos(t), np.sin(t))), closed=True)
    assert pl_length(ngon) == pytest.approx(2 * n * math.sin(math.pi / n), rel=1e-12)


def test_pl_curvature_examples():
    assert pl_total_curvature(SQUARE) == pytest.approx(2 * math.pi)
    assert pl_total_curvature(PLCurve(((0, 0), (1, 0), (2, 1)))) == pytest.approx(math.pi / 4)
    assert pl_total_curvature(PLCurve(((0, 0), (1, 0)))) == 0.0
    for n in (3, 7, 50):
        t = 2 * np.pi * np.arange(n) / n
        assert pl_total_curvature(PLCurve(tuple(zip(np.cos(t), np.sin(t))), closed=True)) == pytest.approx(2 * math.pi)


def test_closed_two_vertex_curve_turns_twice():
    assert pl_total_curvature(PLCurve(((0, 0), (1, 0)), closed=True)) == pytest.approx(2 * math.pi)


def test_pl_errors():
    with pytest.raises(DegenerateCurve):
        pl_length(PLCurve(((0, 0),)))
    with pytest.raises(DegenerateCurve):
        pl_total_curvature(PLCurve(()))
    with pytest.raises(DegenerateSegment):
        pl_total_curvature(PLCurve(((0, 0), (0, 0), (1, 0))))


_coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(_coord, _coord), min_size=3, max_size=12), st.floats(0, 2 * math.pi),
       _coord, _coord, st.booleans())
def test_pl_measures_are_rigid_motion_invariant(pts, angle, dx, dy, closed):
    arr = np.array(pts)
    seg = np.roll(arr, -1, axis=0) - arr if closed else np.diff(arr, axis=0)
    if np.any(np.hypot(seg[:, 0], seg[:, 1]) < 1e-3):
        return
    c, s = math.cos(angle), math.sin(angle)
    moved = arr @ np.array([[c, s], [-s, c]]) + [dx, dy]
    a, b = PLCurve(tuple(map(tuple, arr)), closed), PLCurve(tuple(map(tuple, moved)), closed)
    assert pl_length(b) == pytest.approx(pl_length(a), rel=1e-9, abs=1e-9)
    assert pl_total_curvature(b) == pytest.approx(pl_total_curvature(a), rel=1e-6, abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(_coord, _coord), min_size=3, max_size=12))
def test_closed_curve_curvature_is_at_least_two_pi(pts):
    arr = np.array(pts)
    seg = np.roll(arr, -1, axis=0) - arr
    if np.any(np.hypot(seg[:, 0], seg[:, 1]) < 1e-3):
        return
    # Fenchel: every closed curve turns by at least 2 pi
    assert pl_total_curvature(PLCurve(tuple(pts), closed=True)) >= 2 * math.pi - 1e-9


# ---------------------------------------------------------------------------
# topology of polytrapezoids


def test_single_trapezoid():
    P = _box(0, 2, 0, 1)
    assert euler_characteristic(P) == 1 and betti(P) == (1, 0)
    curves = boundary_curves(P)
    assert len(curves) == 1 and len(curves[0].vertices) == 4 and curves[0].closed
    assert boundary_length(P) == 6.0
    assert boundary_curvature(P) == pytest.approx(2 * math.pi)


def test_l_shape_has_six_boundary_vertices():
    P = Polytrapezoid((0.0, 1.0, 3.0), ((Trapezoid(0, 2, 0, 2),), (Trapezoid(0, 1, 0, 1),)))
    (curve,) = boundary_curves(P)
    assert len(curve.vertices) == 6
    assert pl_length(curve) == 10.0
    # absolute turning: five convex corners and one reflex corner, pi/2 each
    assert pl_total_curvature(curve) == pytest.approx(3 * math.pi)
    assert len(contacts(P)) == 1 and betti(P) == (1, 0)


def test_ring():
    P = _ring()
    assert euler_characteristic(P) == 0 and betti(P) == (1, 1)
    curves = boundary_curves(P)
    assert len(curves) == 2
    assert sorted(pl_length(c) for c in curves) == [4.0, 12.0]
    assert boundary_curvature(P) == pytest.approx(4 * math.pi)


def test_two_components_and_empty():
    P = _union(_box(0, 1, 0, 1), _box(2, 3, 0, 1))
    assert betti(P) == (2, 0) and euler_characteristic(P) == 2
    assert betti(Polytrapezoid()) == (0, 0)
    assert euler_characteristic(Polytrapezoid()) == 0
    assert boundary_curves(Polytrapezoid()) == []


def test_corner_contact_counts():
    # pieces meeting at a single point on the shared breakpoint are connected
    P = Polytrapezoid((0.0, 1.0, 2.0), ((Trapezoid(0, 1, 0, 1),), (Trapezoid(1, 2, 1, 2),)))
    assert len(contacts(P)) == 1 and betti(P) == (1, 0)


@pytest.mark.parametrize(
    "name, expected",
    [("disk", (1, 0)), ("annulus", (1, 1)), ("two_disks", (2, 0)), ("spectacles", (1, 2))],
)
def test_reconstructed_corpus_topology(name, expected):
    eps = 2.0 ** -8
    P = approximate(rasterize(get_shape(name), eps), default_schedule(eps))
    assert betti(P) == expected
    assert euler_characteristic(P) == expected[0] - expected[1]
    assert len(boundary_curves(P)) == sum(expected)


def _fine_cubical(P: Polytrapezoid, eps: float = 0.125):
    bits, i0, j0 = rasterize_polytrapezoid(P, eps)
    spec = GridSpec(eps, (i0, i0 + bits.shape[0] - 1), (j0, j0 + bits.shape[1] - 1))
    return cubical_measures(Pixelation(spec, bits))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_betti_agrees_with_cubical_oracle(seed):
    P = random_polytrapezoid(np.random.default_rng(seed))
    m = _fine_cubical(P)
    assert betti(P) == (m.b0, m.b1)
    assert euler_characteristic(P) == m.chi


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(-20, 20), st.integers(-20, 20))
def test_measures_are_translation_invariant(seed, dx, dy):
    P = random_polytrapezoid(np.random.default_rng(seed))
    Q = P.translated(dx / 4, dy / 4)
    a, b = measure(P), measure(Q)
    assert (a.chi, a.b0, a.b1) == (b.chi, b.b0, b.b1)
    assert b.length == pytest.approx(a.length, rel=1e-12)
    assert b.curvature == pytest.approx(a.curvature, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 2 ** 32 - 1))
def test_measures_are_additive_on_disjoint_unions(s1, s2):
    P = random_polytrapezoid(np.random.default_rng(s1))
    Q = random_polytrapezoid(np.random.default_rng(s2))
    Q = Q.translated(P.bbox()[1] - Q.bbox()[0] + 4.0, 0.0)
    U = _union(P, Q)
    a, b, u = measure(P), measure(Q), measure(U)
    assert (u.b0, u.b1, u.chi) == (a.b0 + b.b0, a.b1 + b.b1, a.chi + b.chi)
    assert u.length == pytest.approx(a.length + b.length, rel=1e-12)
    assert u.curvature == pytest.approx(a.curvature + b.curvature, rel=1e-9)


# ---------------------------------------------------------------------------
# strips


_strip = st.integers(2, 12).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0.05, 2.0), min_size=n - 1, max_size=n - 1),
        st.lists(st.floats(-3, 3), min_size=n, max_size=n),
        st.lists(st.floats(0.05, 3), min_size=n, max_size=n),
    )
)


@settings(max_examples=200, deadline=None)
@given(_strip)
def test_strip_formula_matches_traced_boundary(data):
    gaps, bs, hs = data
    xs = np.concatenate([[0.0], np.cumsum(gaps)])
    ts = np.asarray(bs) + np.asarray(hs)
    P = _strip_poly(xs, bs, ts)
    assert betti(P) == (1, 0)
    assert boundary_curvature(P) == pytest.approx(strip_curvature_formula(xs, bs, ts), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-0.99, 0.99), min_size=2, max_size=20, unique=True), st.floats(0.1, 3.0))
def test_convex_strip_mass_identity(xs, h):
    xs = np.sort(xs)
    if np.min(np.diff(xs)) < 1e-3:
        return
    r = h * np.sqrt(1.0 - xs ** 2)
    P = _strip_poly(xs, -r, r)
    # convex set: curvature is exactly one full turn and the mass is perimeter + 2 pi
    m = measure(P)
    assert m.curvature == pytest.approx(2 * math.pi, abs=1e-9)
    assert m.mass_proxy == pytest.approx(boundary_length(P) + 2 * math.pi, abs=1e-9)


# ---------------------------------------------------------------------------
# half-planes


def test_half_plane_below_everything_is_chi():
    P = _ring()
    assert half_plane_chi(P, (0.0, 1.0), -1.0) == euler_characteristic(P) == 0
    assert half_plane_chi(P, (0.3, 1.0), -5.0) == 0
    assert half_plane_chi(P, (0.0, 1.0), 10.0) == 0


def test_half_plane_cuts_ring():
    P = _ring()
    # the part above y = 1.5 is a U turned upside down
    assert half_plane_chi(P, (0.0, 1.0), 1.5) == 1
    assert half_plane_chi(P, (0.1, 1.0), 2.7) == 1


def test_half_plane_vertical_and_vertex_lines_rejected():
    P = _box(0, 1, 0, 1)
    with pytest.raises(NonGenericLine):
        half_plane_chi(P, (1.0, 0.0), 0.5)
    with pytest.raises(NonGenericLine):
        half_plane_chi(P, (0.0, 1.0), 1.0)


def test_half_plane_reconstructed_disk():
    eps = 2.0 ** -6
    P = approximate(rasterize(Disk(), eps), default_schedule(eps))
    assert half_plane_chi(P, (0.0, 1.0), 0.01) == 1
    assert half_plane_chi(P, (0.2, 1.0), -0.3) == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(-8, 8), st.integers(-80, 80))
def test_half_plane_chi_agrees_with_exact_clip(seed, s8, c8):
    P = random_polytrapezoid(np.random.default_rng(seed))
    s, c = Fraction(s8, 8), Fraction(2 * c8 + 1, 16)
    try:
        got = half_plane_chi(P, (float(s), 1.0), float(c))
    except NonGenericLine:
        return
    assert got == euler_characteristic(clip_above_line(P, s, c))


# ---------------------------------------------------------------------------
# Hausdorff distance and inscribed polygons


def test_hausdorff_identical_and_translated():
    P = _box(0, 1, 0, 1)
    assert hausdorff_distance(P, P, 0.01) <= 0.01
    assert hausdorff_distance(P, P.translated(0.3, 0.0), 0.01) == pytest.approx(0.3, abs=0.01)
    assert hausdorff_distance(P, P.translated(0.3, 0.4), 0.01) == pytest.approx(0.5, abs=0.01)


def test_hausdorff_empty_is_undefined():
    with pytest.raises(UndefinedDistance):
        hausdorff_distance(Polytrapezoid(), Disk(), 0.01)
    with pytest.raises(ValueError):
        hausdorff_distance(_box(0, 1, 0, 1), Disk(), 0.0)


@pytest.mark.parametrize("k", [5, 7, 9])
def test_hausdorff_reconstructed_disk_is_the_cap_corner(k):
    # the cap rectangle spans 2 nu columns and has the cap's height; its
    # outer corners are the farthest points of the reconstruction
    eps = 2.0 ** -k
    cfg = default_schedule(eps)
    P = approximate(rasterize(Disk(), eps), cfg)
    w = 2 * cfg.nu * eps
    corner = math.hypot(1.0, math.sqrt(1.0 - (1.0 - w) ** 2)) - 1.0
    # sampling at spacing eps adds at most eps to either side
    assert corner - 2 * eps <= hausdorff_distance(P, Disk(), eps) <= corner + 3 * eps


def test_inscribed_polygon_examples():
    L, K = inscribed_polygon_measures(Circle(), 1e-3)
    assert L == pytest.approx(2 * math.pi, abs=1e-3) and K == pytest.approx(2 * math.pi, abs=1e-9)
    seg = (lambda t: np.column_stack([3 * t, 4 * t]), 0.0, 1.0, False)
    L, K = inscribed_polygon_measures(seg, 1e-3)
    assert L == pytest.approx(5.0, abs=1e-12) and K == pytest.approx(0.0, abs=1e-9)
    L, K = inscribed_polygon_measures(get_shape("ellipse"), 1e-3)
    assert L == pytest.approx(ellipse_perimeter(2.0, 1.0), abs=1e-3)
    assert K == pytest.approx(2 * math.pi, abs=1e-9)
    with pytest.raises(ValueError):
        inscribed_polygon_measures(Circle(), 0.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 0.3))
def test_inscribed_length_never_exceeds_arc_length(mesh):
    L, _ = inscribed_polygon_measures(get_shape("ellipse"), mesh)
    assert L <= ellipse_perimeter(2.0, 1.0) + 1e-12


# ---------------------------------------------------------------------------
# reports


def test_measure_report_and_csv():
    r = measure(_ring(), "ring", 0.5, 2, 3)
    assert (r.length, r.chi, r.b0, r.b1) == (16.0, 0, 1, 1)
    assert r.mass_proxy == pytest.approx(16.0 + 4 * math.pi)
    lines = report_to_csv([r]).splitlines()
    assert lines[0] == "shape,epsilon,sigma,nu,length,curvature,chi,b0,b1,hausdorff"
    assert lines[1].startswith("ring,0.5,2,3,16.0,")
    assert report_to_csv([r], header=False).splitlines() == lines[1:]
    assert isinstance(r, MeasureReport) and math.isnan(r.hausdorff)
