"""Length, curvature and topology of PL curves and polytrapezoids.

Topological counts use the nerve of the slab complex: pieces inside one slab
are pairwise disjoint and pieces in non-adjacent slabs never meet, so the
nerve has no triangles and ``chi = #pieces - #contacts``, where a contact is
a pair of pieces in adjacent slabs whose vertical edges on the shared
breakpoint intersect.  Every piece and every contact is convex, hence
contractible.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateCurve, DegenerateSegment, InvariantViolation, NonGenericLine, UndefinedDistance
from .recover import Polytrapezoid

__all__ = [
    "PLCurve",
    "MeasureReport",
    "pl_length",
    "pl_total_curvature",
    "turning_angles",
    "boundary_curves",
    "boundary_length",
    "boundary_curvature",
    "contacts",
    "euler_characteristic",
    "betti",
    "half_plane_chi",
    "sample_polytrapezoid",
    "hausdorff_distance",
    "inscribed_polygon_measures",
    "strip_curvature_formula",
    "measure",
    "report_to_csv",
]


@dataclass(frozen=True)
class PLCurve:
    vertices: tuple[tuple[float, float], ...]
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple((float(x), float(y)) for x, y in self.vertices))

    def array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float).reshape(-1, 2)

    def segments(self) -> np.ndarray:
        """Direction vectors of consecutive segments (closing one included when closed)."""
        v = self.array()
        if self.closed:
            return np.roll(v, -1, axis=0) - v
        return np.diff(v, axis=0)


def pl_length(c: PLCurve) -> float:
    if len(c.vertices) < 2:
        raise DegenerateCurve(f"need at least 2 vertices, got {len(c.vertices)}")
    d = c.segments()
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def turning_angles(c: PLCurve) -> np.ndarray:
    """Exterior angle in ``[0, pi]`` at each vertex where two segments meet."""
    if len(c.vertices) < 2:
        raise DegenerateCurve(f"need at least 2 vertices, got {len(c.vertices)}")
    d = c.segments()
    if np.any((d[:, 0] == 0) & (d[:, 1] == 0)):
        raise DegenerateSegment("zero-length segment")
    if c.closed:
        a, b = d, np.roll(d, -1, axis=0)
    else:
        a, b = d[:-1], d[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]
    return np.arctan2(np.abs(cross), dot)


def pl_total_curvature(c: PLCurve) -> float:
    """Sum of exterior angles; a closed curve also turns at its start vertex.

    A closed two-vertex curve is a segment traversed both ways and has
    curvature ``2 pi``.
    """
    return float(turning_angles(c).sum())


# ---------------------------------------------------------------------------
# contacts, chi, betti


def _interval_pairs(left: Sequence[tuple], right: Sequence[tuple]) -> list[tuple[int, int]]:
    """Index pairs of intersecting closed intervals; both lists sorted and internally disjoint."""
    out = []
    a = b = 0
    while a < len(left) and b < len(right):
        lo = max(left[a][0], right[b][0])
        hi = min(left[a][1], right[b][1])
        if lo <= hi:
            out.append((a, b))
        if left[a][1] < right[b][1]:
            a += 1
        else:
            b += 1
    return out


def contacts(P: Polytrapezoid) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Pairs ``((slab, k), (slab + 1, k'))`` of pieces that touch across a breakpoint."""
    out = []
    for s in range(len(P.slabs) - 1):
        right = [(t.ybr, t.ytr) for t in P.slabs[s]]
        left = [(t.ybl, t.ytl) for t in P.slabs[s + 1]]
        out.extend(((s, a), (s + 1, b)) for a, b in _interval_pairs(right, left))
    return out


def euler_characteristic(P: Polytrapezoid) -> int:
    return P.n_pieces() - len(contacts(P))


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _piece_ids(P: Polytrapezoid) -> dict[tuple[int, int], int]:
    ids = {}
    for s, slab in enumerate(P.slabs):
        for k in range(len(slab)):
            ids[(s, k)] = len(ids)
    return ids


def betti(P: Polytrapezoid) -> tuple[int, int]:
    ids = _piece_ids(P)
    dsu = _DSU(len(ids))
    cs = contacts(P)
    for u, v in cs:
        dsu.union(ids[u], ids[v])
    b0 = len({dsu.find(i) for i in range(len(ids))})
    chi = len(ids) - len(cs)
    return b0, b0 - chi


def _clip_interval(lo: Fraction, hi: Fraction, x: Fraction, a: Fraction, b: Fraction, c: Fraction):
    """``[lo, hi] ∩ {y : a x + b y >= c}`` on the vertical line at ``x`` (``b != 0``)."""
    y0 = (c - a * x) / b
    if b > 0:
        lo = max(lo, y0)
    else:
        hi = min(hi, y0)
    return (lo, hi) if lo <= hi else None


def half_plane_chi(P: Polytrapezoid, xi: Sequence[float], c: float) -> int:
    """``chi(P ∩ {p : xi·p >= c})`` in exact rational arithmetic.

    Each trapezoid clips to a convex set, nonempty iff one of its corners lies
    in the half-plane; contacts clip to the intersection of the clipped edges.
    """
    a, b, c = Fraction(xi[0]), Fraction(xi[1]), Fraction(c)
    if b == 0:
        raise NonGenericLine("vertical line")
    F = Fraction
    bps = [F(x) for x in P.breakpoints]
    clipped = []
    pieces = 0
    for s, slab in enumerate(P.slabs):
        xl, xr = bps[s], bps[s + 1]
        lefts, rights = [], []
        for t in slab:
            corners = ((xl, F(t.ybl)), (xl, F(t.ytl)), (xr, F(t.ybr)), (xr, F(t.ytr)))
            vals = [a * x + b * y - c for x, y in corners]
            if any(v == 0 for v in vals):
                raise NonGenericLine(f"line passes through a vertex of slab {s}")
            pieces += any(v > 0 for v in vals)
            le = _clip_interval(F(t.ybl), F(t.ytl), xl, a, b, c)
            re = _clip_interval(F(t.ybr), F(t.ytr), xr, a, b, c)
            if le is not None:
                lefts.append(le)
            if re is not None:
                rights.append(re)
        clipped.append((lefts, rights))
    n_contacts = 0
    for s in range(len(clipped) - 1):
        n_contacts += len(_interval_pairs(clipped[s][1], clipped[s + 1][0]))
    return pieces - n_contacts


# ---------------------------------------------------------------------------
# boundary tracing


def _subtract(lo: float, hi: float, covers: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Closure of ``[lo, hi]`` minus the union of closed intervals, positive-length parts only."""
    out = []
    cur = lo
    for a, b in sorted(covers):
        if b < cur or a > hi:
            continue
        if a > cur:
            out.append((cur, a))
        cur = max(cur, b)
        if cur >= hi:
            break
    if cur < hi:
        out.append((cur, hi))
    return out


def _boundary_edges(P: Polytrapezoid) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    edges = []
    n = len(P.slabs)
    for s, xl, xr, t in P.pieces():
        edges.append(((xl, t.ybl), (xr, t.ybr)))
        edges.append(((xr, t.ytr), (xl, t.ytl)))
        right_cover = [(u.ybl, u.ytl) for u in P.slabs[s + 1]] if s + 1 < n else []
        for lo, hi in _subtract(t.ybr, t.ytr, right_cover):
            edges.append(((xr, lo), (xr, hi)))
        left_cover = [(u.ybr, u.ytr) for u in P.slabs[s - 1]] if s > 0 else []
        for lo, hi in _subtract(t.ybl, t.ytl, left_cover):
            edges.append(((xl, hi), (xl, lo)))
    return edges


def _fuse(cycle: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Drop vertices where the path continues straight on (reversals are kept)."""
    changed = True
    while changed and len(cycle) > 2:
        changed = False
        out = []
        n = len(cycle)
        for k in range(n):
            p, q, r = cycle[k - 1], cycle[k], cycle[(k + 1) % n]
            d1 = (q[0] - p[0], q[1] - p[1])
            d2 = (r[0] - q[0], r[1] - q[1])
            cross = d1[0] * d2[1] - d1[1] * d2[0]
            dot = d1[0] * d2[0] + d1[1] * d2[1]
            scale = math.hypot(*d1) * math.hypot(*d2)
            if dot > 0 and abs(cross) <= 1e-12 * scale:
                changed = True
                continue
            out.append(q)
        if changed:
            cycle = out
    return cycle


def boundary_curves(P: Polytrapezoid) -> list[PLCurve]:
    """Closed boundary cycles, each with the region on its left.

    At a vertex with several outgoing edges the walk takes the first one
    counterclockwise from the edge it arrived on, which keeps the exterior on
    the right; a straight reversal (the far end of a zero-height sliver) is
    the last resort.
    """
    edges = _boundary_edges(P)
    out_edges: dict[tuple[float, float], list[int]] = {}
    for k, (u, _) in enumerate(edges):
        out_edges.setdefault(u, []).append(k)
    used = [False] * len(edges)
    cycles = []
    for start in range(len(edges)):
        if used[start]:
            continue
        cyc = []
        k = start
        while not used[k]:
            used[k] = True
            u, v = edges[k]
            cyc.append(u)
            back = math.atan2(u[1] - v[1], u[0] - v[0])
            best, best_ang = None, math.inf
            for e in out_edges.get(v, ()):
                if used[e] and e != start:
                    continue
                w = edges[e][1]
                ang = (math.atan2(w[1] - v[1], w[0] - v[0]) - back) % (2 * math.pi)
                if ang == 0:
                    ang = 2 * math.pi
                if ang < best_ang:
                    best, best_ang = e, ang
            if best is None:
                raise InvariantViolation(f"open boundary path at {v}")
            k = best
        if k != start:
            raise InvariantViolation("boundary walk did not close")
        cycles.append(PLCurve(tuple(_fuse(cyc)), closed=True))
    return cycles


def boundary_length(P: Polytrapezoid) -> float:
    return sum(pl_length(c) for c in boundary_curves(P))


def boundary_curvature(P: Polytrapezoid) -> float:
    return sum(pl_total_curvature(c) for c in boundary_curves(P))


def strip_curvature_formula(xs: Sequence[float], bottoms: Sequence[float], tops: Sequence[float]) -> float:
    """Total curvature of the boundary of a PL strip, from the interpolant slopes.

    Four corner terms plus the slope-angle variation along bottom and top::

        |pi/2 + atan m1b| + |pi/2 - atan mnb| + |pi/2 + atan mnt| + |pi/2 - atan m1t|
        + sum |atan m(k+1)b - atan mkb| + sum |atan m(k+1)t - atan mkt|
    """
    xs, bs, ts = (np.asarray(v, dtype=float) for v in (xs, bottoms, tops))
    dx = np.diff(xs)
    ab = np.arctan(np.diff(bs) / dx)
    at = np.arctan(np.diff(ts) / dx)
    h = math.pi / 2
    corners = abs(h + ab[0]) + abs(h - ab[-1]) + abs(h + at[-1]) + abs(h - at[0])
    return float(corners + np.abs(np.diff(ab)).sum() + np.abs(np.diff(at)).sum())


# ---------------------------------------------------------------------------
# Hausdorff distance and inscribed polygons


def sample_polytrapezoid(P: Polytrapezoid, density: float) -> np.ndarray:
    """Points filling every trapezoid with spacing at most ``density``, edges included."""
    if density <= 0:
        raise ValueError("density must be positive")
    pts = []
    for _, xl, xr, t in P.pieces():
        nx = max(1, int(math.ceil((xr - xl) / density)))
        u = np.linspace(0.0, 1.0, nx + 1)
        x = xl + (xr - xl) * u
        lo = t.ybl + (t.ybr - t.ybl) * u
        hi = t.ytl + (t.ytr - t.ytl) * u
        ny = max(1, int(math.ceil(float(np.max(hi - lo)) / density)))
        v = np.linspace(0.0, 1.0, ny + 1)
        ys = lo[:, None] + (hi - lo)[:, None] * v[None, :]
        pts.append(np.column_stack([np.repeat(x, ny + 1), ys.ravel()]))
    if not pts:
        return np.zeros((0, 2))
    return np.concatenate(pts, axis=0)


def _points(obj, density: float) -> np.ndarray:
    if isinstance(obj, Polytrapezoid):
        return sample_polytrapezoid(obj, density)
    if hasattr(obj, "sample"):
        return np.asarray(obj.sample(density), dtype=float).reshape(-1, 2)
    return np.asarray(obj, dtype=float).reshape(-1, 2)


def hausdorff_distance(P, shape, density: float) -> float:
    """Symmetric Hausdorff distance between point samples of two sets.

    Either argument may be a polytrapezoid, a corpus shape or a point array.
    The sampling error is at most ``density``.
    """
    if density <= 0:
        raise ValueError("density must be positive")
    a = _points(P, density)
    b = _points(shape, density)
    if len(a) == 0 or len(b) == 0:
        raise UndefinedDistance("Hausdorff distance of an empty set")
    da, _ = cKDTree(b).query(a)
    db, _ = cKDTree(a).query(b)
    return float(max(da.max(), db.max()))


def inscribed_polygon_measures(arc, mesh: float) -> tuple[float, float]:
    """Length and total curvature of an inscribed polygon with mesh at most ``mesh``.

    ``arc`` is either a shape with ``parametrization()`` or a tuple
    ``(gamma, t0, t1, closed)``, where ``gamma`` maps an array of parameters
    to an ``(n, 2)`` array.  Parameters are refined until every chord is
    no longer than ``mesh``.
    """
    if mesh <= 0:
        raise ValueError("mesh must be positive")
    gamma, t0, t1, closed = arc.parametrization() if hasattr(arc, "parametrization") else arc
    n = 8
    while True:
        t = np.linspace(t0, t1, n + 1)
        pts = gamma(t)
        chords = np.hypot(*np.diff(pts, axis=0).T)
        if chords.max() <= mesh:
            break
        n = int(math.ceil(n * chords.max() / mesh)) + 1
    verts = pts[:-1] if closed else pts
    curve = PLCurve(tuple(map(tuple, verts)), closed=closed)
    return pl_length(curve), pl_total_curvature(curve)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureReport:
    shape: str
    epsilon: float
    sigma: int
    nu: int
    length: float
    curvature: float
    chi: int
    b0: int
    b1: int
    hausdorff: float = math.nan

    @property
    def mass_proxy(self) -> float:
        return self.length + self.curvature


def measure(P: Polytrapezoid, shape_name: str = "", epsilon: float = math.nan, sigma: int = 0, nu: int = 0,
            hausdorff: float = math.nan) -> MeasureReport:
    b0, b1 = betti(P)
    curves = boundary_curves(P)
    length = sum(pl_length(c) for c in curves)
    curv = sum(pl_total_curvature(c) for c in curves)
    return MeasureReport(shape_name, epsilon, sigma, nu, length, curv, b0 - b1, b0, b1, hausdorff)


def report_to_csv(reports: Sequence[MeasureReport], header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow([f.name for f in fields(MeasureReport)])
    for r in reports:
        w.writerow(astuple(r))
    return buf.getvalue()
