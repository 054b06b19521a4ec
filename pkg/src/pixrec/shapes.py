"""Analytic corpus of compact planar sets.

Every shape answers the same questions: does a closed axis-aligned square
meet it (exactly, for the primitives here), how many components does a
vertical line cut out of it, what is the Euler characteristic of its
intersection with a closed half-plane, and what are its ground-truth
invariants.  These answers are the oracles every reconstruction run is
checked against.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from .errors import UnknownShape

__all__ = [
    "GroundTruth",
    "Shape",
    "Disk",
    "Circle",
    "Annulus",
    "Ellipse",
    "PerforatedDisk",
    "Segments",
    "Profile",
    "Elementary",
    "ImplicitRegion",
    "Union",
    "Translated",
    "touches",
    "component_counter",
    "corpus",
    "corpus_manifest",
    "get_shape",
    "ellipse_perimeter",
]


@dataclass(frozen=True)
class GroundTruth:
    """Invariants of a shape known independently of any pixelation.

    ``length`` and ``curvature`` refer to the boundary of the set.  For
    1-dimensional shapes they are the two-sided values (the limit of the
    boundary of thin tubes), which is what the reconstruction converges to.
    ``None`` means no trustworthy closed form or quadrature is available.
    """

    b0: int
    b1: int
    jumps: tuple[float, ...]
    length: float | None = None
    curvature: float | None = None
    kappa0_hint: float = 0.5
    pixel_b1: int | None = None
    note: str = ""

    @property
    def chi(self) -> int:
        return self.b0 - self.b1


def _lattice_edges(eps: float, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(lo, hi + 1, dtype=np.float64)
    return (idx - 1.0) * eps, idx * eps


def _gap(lo, hi, c):
    # distance from c to the closed interval [lo, hi]
    return np.maximum(np.maximum(lo - c, c - hi), 0.0)


def _far(lo, hi, c):
    return np.maximum(np.abs(lo - c), np.abs(hi - c))


def _count_runs(mask: np.ndarray) -> int:
    if mask.size == 0:
        return 0
    m = mask.astype(np.int8)
    return int(m[0] + np.count_nonzero(np.diff(m) == 1))


def _grid_points(bbox, density: float) -> tuple[np.ndarray, np.ndarray]:
    xmin, xmax, ymin, ymax = bbox
    xs = np.arange(xmin, xmax + density, density)
    ys = np.arange(ymin, ymax + density, density)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return gx.ravel(), gy.ravel()


class Shape:
    """Base class; subclasses implement the primitive-specific parts."""

    name: str = ""
    kind: str = ""
    is_curve: bool = False
    generic: bool = True
    exact: bool = True
    truth: GroundTruth | None = None

    def bbox(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    def touch_rects(self, xlo, xhi, ylo, yhi) -> np.ndarray:
        """Closed-rectangle intersection test on the product of x and y intervals.

        Returns a boolean array of shape ``(len(xlo), len(ylo))``.
        """
        raise NotImplementedError

    def touch_grid(self, eps: float, i_range: tuple[int, int], j_range: tuple[int, int]) -> np.ndarray:
        xlo, xhi = _lattice_edges(eps, *i_range)
        ylo, yhi = _lattice_edges(eps, *j_range)
        return self.touch_rects(xlo, xhi, ylo, yhi)

    def contains(self, x, y) -> np.ndarray:
        return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)

    def component_counter(self, x: float) -> int:
        raise NotImplementedError

    def half_plane_chi(self, xi: Sequence[float], c: float) -> int:
        """Euler characteristic of ``S ∩ {p : xi·p >= c}``."""
        raise NotImplementedError

    def boundary_points(self, density: float) -> np.ndarray:
        raise NotImplementedError

    def sample(self, density: float) -> np.ndarray:
        """Points of the set with spacing at most ``density`` (boundary plus interior)."""
        pts = [self.boundary_points(density)]
        if not self.is_curve:
            gx, gy = _grid_points(self.bbox(), density)
            inside = self.contains(gx, gy)
            pts.append(np.column_stack([gx[inside], gy[inside]]))
        return np.concatenate(pts, axis=0)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name or self.kind}>"


def _circle_points(cx, cy, r, density):
    n = max(16, int(math.ceil(2 * math.pi * r / (density / 2))))
    t = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    return np.column_stack([cx + r * np.cos(t), cy + r * np.sin(t)])


class Disk(Shape):
    kind = "disk"

    def __init__(self, cx=0.0, cy=0.0, r=1.0, name=""):
        self.cx, self.cy, self.r = float(cx), float(cy), float(r)
        self.name = name

    def bbox(self):
        return (self.cx - self.r, self.cx + self.r, self.cy - self.r, self.cy + self.r)

    def touch_rects(self, xlo, xhi, ylo, yhi):
        gx = _gap(xlo, xhi, self.cx)
        gy = _gap(ylo, yhi, self.cy)
        return gx[:, None] ** 2 + gy[None, :] ** 2 <= self.r ** 2

    def contains(self, x, y):
        return (np.asarray(x) - self.cx) ** 2 + (np.asarray(y) - self.cy) ** 2 <= self.r ** 2

    def component_counter(self, x):
        return int(abs(x - self.cx) <= self.r)

    def half_plane_chi(self, xi, c):
        top = xi[0] * self.cx + xi[1] * self.cy + self.r * math.hypot(*xi)
        return int(top >= c)

    def boundary_points(self, density):
        return _circle_points(self.cx, self.cy, self.r, density)

    def parametrization(self):
        cx, cy, r = self.cx, self.cy, self.r
        return (lambda t: np.column_stack([cx + r * np.cos(t), cy + r * np.sin(t)]), 0.0, 2 * math.pi, True)


class Circle(Disk):
    kind = "circle"
    is_curve = True

    def touch_rects(self, xlo, xhi, ylo, yhi):
        near = _gap(xlo, xhi, self.cx)[:, None] ** 2 + _gap(ylo, yhi, self.cy)[None, :] ** 2
        far = _far(xlo, xhi, self.cx)[:, None] ** 2 + _far(ylo, yhi, self.cy)[None, :] ** 2
        r2 = self.r ** 2
        return (near <= r2) & (far >= r2)

    def contains(self, x, y):
        return super().contains(x, y) & False

    def component_counter(self, x):
        d = abs(x - self.cx)
        return 2 if d < self.r else int(d == self.r)

    def half_plane_chi(self, xi, c):
        norm = math.hypot(*xi)
        h = (c - xi[0] * self.cx - xi[1] * self.cy) / norm
        # full circle and empty set both have chi 0
        return int(-self.r < h <= self.r)


class Annulus(Shape):
    kind = "annulus"

    def __init__(self, cx=0.0, cy=0.0, r_in=1.0, r_out=2.0, name=""):
        self.cx, self.cy = float(cx), float(cy)
        self.r_in, self.r_out = float(r_in), float(r_out)
        self.name = name

    def bbox(self):
        R = self.r_out
        return (self.cx - R, self.cx + R, self.cy - R, self.cy + R)

    def touch_rects(self, xlo, xhi, ylo, yhi):
        near = _gap(xlo, xhi, self.cx)[:, None] ** 2 + _gap(ylo, yhi, self.cy)[None, :] ** 2
        far = _far(xlo, xhi, self.cx)[:, None] ** 2 + _far(ylo, yhi, self.cy)[None, :] ** 2
        return (near <= self.r_out ** 2) & (far >= self.r_in ** 2)

    def contains(self, x, y):
        d2 = (np.asarray(x) - self.cx) ** 2 + (np.asarray(y) - self.cy) ** 2
        return (d2 <= self.r_out ** 2) & (d2 >= self.r_in ** 2)

    def component_counter(self, x):
        d = abs(x - self.cx)
        if d > self.r_out:
            return 0
        return 2 if d < self.r_in else 1

    def half_plane_chi(self, xi, c):
        h = (c - xi[0] * self.cx - xi[1] * self.cy) / math.hypot(*xi)
        if h > self.r_out:
            return 0
        # the half-plane swallows the whole hole: an annulus with a bite taken out
        return 0 if h < -self.r_in else 1

    def boundary_points(self, density):
        return np.concatenate([
            _circle_points(self.cx, self.cy, self.r_out, density),
            _circle_points(self.cx, self.cy, self.r_in, density),
        ])


class Ellipse(Shape):
    kind = "ellipse"

    def __init__(self, cx=0.0, cy=0.0, a=2.0, b=1.0, name=""):
        self.cx, self.cy, self.a, self.b = float(cx), float(cy), float(a), float(b)
        self.name = name

    def bbox(self):
        return (self.cx - self.a, self.cx + self.a, self.cy - self.b, self.cy + self.b)

    def touch_rects(self, xlo, xhi, ylo, yhi):
        # scaling the axes maps the rectangle to a rectangle and the ellipse to the unit disk
        gx = _gap(xlo, xhi, self.cx) / self.a
        gy = _gap(ylo, yhi, self.cy) / self.b
        return gx[:, None] ** 2 + gy[None, :] ** 2 <= 1.0

    def contains(self, x, y):
        u = (np.asarray(x) - self.cx) / self.a
        v = (np.asarray(y) - self.cy) / self.b
        return u * u + v * v <= 1.0

    def component_counter(self, x):
        return int(abs(x - self.cx) <= self.a)

    def half_plane_chi(self, xi, c):
        top = xi[0] * self.cx + xi[1] * self.cy + math.hypot(self.a * xi[0], self.b * xi[1])
        return int(top >= c)

    def parametrization(self):
        cx, cy, a, b = self.cx, self.cy, self.a, self.b
        return (lambda t: np.column_stack([cx + a * np.cos(t), cy + b * np.sin(t)]), 0.0, 2 * math.pi, True)

    def boundary_points(self, density):
        n = max(16, int(math.ceil(2 * math.pi * max(self.a, self.b) / (density / 2))))
        t = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
        return np.column_stack([self.cx + self.a * np.cos(t), self.cy + self.b * np.sin(t)])


def _subtract_open(interval, holes):
    """Closed interval minus a list of open intervals; returns remaining closed pieces."""
    pieces = [interval]
    for lo, hi in holes:
        nxt = []
        for a, b in pieces:
            if hi <= a or lo >= b:
                nxt.append((a, b))
                continue
            if a <= lo:
                nxt.append((a, lo))
            if hi <= b:
                nxt.append((hi, b))
        pieces = nxt
    return pieces


class PerforatedDisk(Shape):
    """Closed disk with open circular holes strictly inside it.

    Holes must be pairwise disjoint and keep a positive margin from the
    outer circle; then the touch test below is exact, because a closed
    square covered by the open holes lies in a single one of them.
    """

    kind = "perforated-disk"

    def __init__(self, outer=(0.0, 0.0, 2.0), holes=(), name=""):
        self.outer = tuple(float(v) for v in outer)
        self.holes = [tuple(float(v) for v in h) for h in holes]
        self.name = name

    def bbox(self):
        cx, cy, R = self.outer
        return (cx - R, cx + R, cy - R, cy + R)

    def touch_rects(self, xlo, xhi, ylo, yhi):
        cx, cy, R = self.outer
        hit = _gap(xlo, xhi, cx)[:, None] ** 2 + _gap(ylo, yhi, cy)[None, :] ** 2 <= R * R
        for hx, hy, r in self.holes:
            far = _far(xlo, xhi, hx)[:, None] ** 2 + _far(ylo, yhi, hy)[None, :] ** 2
            hit &= ~(far < r * r)
        return hit

    def contains(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        cx, cy, R = self.outer
        inside = (x - cx) ** 2 + (y - cy) ** 2 <= R * R
        for hx, hy, r in self.holes:
            inside &= (x - hx) ** 2 + (y - hy) ** 2 >= r * r
        return inside

    def component_counter(self, x):
        cx, cy, R = self.outer
        if abs(x - cx) > R:
            return 0
        s = math.sqrt(max(R * R - (x - cx) ** 2, 0.0))
        cuts = []
        for hx, hy, r in self.holes:
            if abs(x - hx) < r:
                t = math.sqrt(r * r - (x - hx) ** 2)
                cuts.append((hy - t, hy + t))
        return len(_subtract_open((cy - s, cy + s), sorted(cuts)))

    def half_plane_chi(self, xi, c):
        norm = math.hypot(*xi)
        cx, cy, R = self.outer
        if xi[0] * cx + xi[1] * cy + R * norm < c:
            return 0
        swallowed = sum(1 for hx, hy, r in self.holes if xi[0] * hx + xi[1] * hy - r * norm > c)
        return 1 - swallowed

    def boundary_points(self, density):
        pts = [_circle_points(*self.outer, density)]
        pts += [_circle_points(*h, density) for h in self.holes]
        return np.concatenate(pts)


class Segments(Shape):
    """Finite union of closed line segments meeting only at shared endpoints."""

    kind = "segment-union"
    is_curve = True

    def __init__(self, segments, name=""):
        self.segments = [((float(p[0]), float(p[1])), (float(q[0]), float(q[1]))) for p, q in segments]
        self.name = name

    def bbox(self):
        xs = [v[0] for s in self.segments for v in s]
        ys = [v[1] for s in self.segments for v in s]
        return (min(xs), max(xs), min(ys), max(ys))

    def touch_rects(self, xlo, xhi, ylo, yhi):
        out = np.zeros((len(xlo), len(ylo)), dtype=bool)
        for (px, py), (qx, qy) in self.segments:
            # separating axes: x, y, and the segment normal
            bx = (min(px, qx) <= xhi) & (max(px, qx) >= xlo)
            by = (min(py, qy) <= yhi) & (max(py, qy) >= ylo)
            nx, ny = py - qy, qx - px
            ax0, ax1 = nx * (xlo - px), nx * (xhi - px)
            ay0, ay1 = ny * (ylo - py), ny * (yhi - py)
            smin = np.minimum(ax0, ax1)[:, None] + np.minimum(ay0, ay1)[None, :]
            smax = np.maximum(ax0, ax1)[:, None] + np.maximum(ay0, ay1)[None, :]
            out |= bx[:, None] & by[None, :] & (smin <= 0) & (smax >= 0)
        return out

    def component_counter(self, x):
        spans = []
        for (px, py), (qx, qy) in self.segments:
            if not min(px, qx) <= x <= max(px, qx):
                continue
            if px == qx:
                spans.append((min(py, qy), max(py, qy)))
            else:
                y = py + (qy - py) * (x - px) / (qx - px)
                spans.append((y, y))
        spans.sort()
        count, top = 0, -math.inf
        for lo, hi in spans:
            if lo > top + 1e-12:
                count += 1
            top = max(top, hi)
        return count

    def half_plane_chi(self, xi, c):
        nodes: set = set()
        edges = 0
        fresh = 0
        for p, q in self.segments:
            fp = xi[0] * p[0] + xi[1] * p[1] - c
            fq = xi[0] * q[0] + xi[1] * q[1] - c
            if fp < 0 and fq < 0:
                continue
            ends = []
            for f, v in ((fp, p), (fq, q)):
                if f >= 0:
                    ends.append(v)
                else:
                    fresh += 1
                    ends.append(("cut", fresh))
            nodes.update(ends)
            edges += 1
        return len(nodes) - edges

    def boundary_points(self, density):
        pts = []
        for p, q in self.segments:
            n = max(2, int(math.ceil(math.dist(p, q) / (density / 2))) + 1)
            t = np.linspace(0.0, 1.0, n)[:, None]
            pts.append(np.asarray(p) + t * (np.asarray(q) - np.asarray(p)))
        return np.concatenate(pts)


class Profile:
    """A continuous function of x together with the points where it may stop being monotone.

    Knowing those points makes the range of the function over any interval
    exactly computable: it is attained at the interval ends or at one of
    the listed critical points.
    """

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], critical: Sequence[float] = ()):
        self.fn = fn
        self.critical = tuple(sorted(float(c) for c in critical))

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=np.float64))

    @classmethod
    def constant(cls, value: float) -> "Profile":
        return cls(lambda x: np.full(np.shape(x), float(value)))

    @classmethod
    def piecewise_poly(cls, breaks: Sequence[float], polys: Sequence[Polynomial]) -> "Profile":
        breaks = np.asarray(breaks, dtype=np.float64)
        polys = list(polys)

        def fn(x):
            x = np.asarray(x, dtype=np.float64)
            k = np.clip(np.searchsorted(breaks, x, side="right") - 1, 0, len(polys) - 1)
            out = np.empty(np.shape(x))
            for n, poly in enumerate(polys):
                sel = k == n
                out[sel] = poly(x[sel])
            return out

        crit = list(breaks[1:-1])
        for n, poly in enumerate(polys):
            for root in poly.deriv().roots() if poly.degree() > 1 else []:
                if abs(root.imag) < 1e-12 and breaks[n] < root.real < breaks[n + 1]:
                    crit.append(root.real)
        return cls(fn, crit)

    def extremes(self, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        flo, fhi = self(lo), self(hi)
        mn, mx = np.minimum(flo, fhi), np.maximum(flo, fhi)
        for c in self.critical:
            sel = (lo <= c) & (c <= hi)
            if sel.any():
                fc = float(self(np.array([c]))[0])
                mn[sel] = np.minimum(mn[sel], fc)
                mx[sel] = np.maximum(mx[sel], fc)
        return mn, mx


class Elementary(Shape):
    """The region between the graphs of ``beta <= tau`` over ``[a, b]``.

    The vertical-strip slice of an elementary set is connected, so the
    projection to the y-axis of its part over any x-interval X is exactly
    ``[min beta(X), max tau(X)]``; a closed square meets the set iff that
    interval meets the square's y-interval.
    """

    kind = "elementary"

    def __init__(self, beta: Profile, tau: Profile, a: float, b: float, name="", degenerate=False):
        self.beta, self.tau = beta, tau
        self.a, self.b = float(a), float(b)
        self.name = name
        self.is_curve = degenerate

    @classmethod
    def graph(cls, f: Profile, a: float, b: float, name="") -> "Elementary":
        return cls(f, f, a, b, name=name, degenerate=True)

    @classmethod
    def box(cls, x0, x1, y0, y1, name="") -> "Elementary":
        return cls(Profile.constant(y0), Profile.constant(y1), x0, x1, name=name)

    def bbox(self):
        lo, hi = np.array([self.a]), np.array([self.b])
        return (self.a, self.b, float(self.beta.extremes(lo, hi)[0][0]), float(self.tau.extremes(lo, hi)[1][0]))

    def touch_rects(self, xlo, xhi, ylo, yhi):
        lo = np.maximum(xlo, self.a)
        hi = np.minimum(xhi, self.b)
        valid = lo <= hi
        lo_c, hi_c = np.where(valid, lo, self.a), np.where(valid, hi, self.a)
        mn = self.beta.extremes(lo_c, hi_c)[0]
        mx = self.tau.extremes(lo_c, hi_c)[1]
        return valid[:, None] & (mn[:, None] <= yhi[None, :]) & (mx[:, None] >= ylo[None, :])

    def contains(self, x, y):
        x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
        xc = np.clip(x, self.a, self.b)
        return (x >= self.a) & (x <= self.b) & (self.beta(xc) <= y) & (y <= self.tau(xc))

    def component_counter(self, x):
        return int(self.a <= x <= self.b)

    def half_plane_chi(self, xi, c, samples: int = 20001):
        xs = np.linspace(self.a, self.b, samples)
        if xi[1] > 0:
            ok = xi[0] * xs + xi[1] * self.tau(xs) >= c
        elif xi[1] < 0:
            ok = xi[0] * xs + xi[1] * self.beta(xs) >= c
        else:
            ok = xi[0] * xs >= c
        return _count_runs(ok)

    def boundary_points(self, density):
        n = max(2, int(math.ceil((self.b - self.a) / (density / 2))) + 1)
        xs = np.linspace(self.a, self.b, n)
        pts = [np.column_stack([xs, self.beta(xs)]), np.column_stack([xs, self.tau(xs)])]
        for x in (self.a, self.b):
            y0, y1 = float(self.beta(np.array([x]))[0]), float(self.tau(np.array([x]))[0])
            k = max(2, int(math.ceil((y1 - y0) / (density / 2))) + 1)
            pts.append(np.column_stack([np.full(k, x), np.linspace(y0, y1, k)]))
        return np.concatenate(pts)


class ImplicitRegion(Shape):
    """``{F <= 0}`` inside a known bounding box; rasterized by supersampling only."""

    kind = "implicit"
    exact = False

    def __init__(self, F, bbox, name=""):
        self.F = F
        self._bbox = tuple(float(v) for v in bbox)
        self.name = name

    def bbox(self):
        return self._bbox

    def touch_rects(self, xlo, xhi, ylo, yhi):
        raise NotImplementedError("implicit regions have no exact touch test")

    def contains(self, x, y):
        return np.asarray(self.F(np.asarray(x, float), np.asarray(y, float))) <= 0


class Union(Shape):
    """Union of pairwise disjoint shapes."""

    kind = "union"

    def __init__(self, parts, name=""):
        self.parts = list(parts)
        self.name = name
        self.is_curve = all(p.is_curve for p in self.parts)
        self.exact = all(p.exact for p in self.parts)

    def bbox(self):
        boxes = np.array([p.bbox() for p in self.parts])
        return (boxes[:, 0].min(), boxes[:, 1].max(), boxes[:, 2].min(), boxes[:, 3].max())

    def touch_rects(self, xlo, xhi, ylo, yhi):
        out = np.zeros((len(xlo), len(ylo)), dtype=bool)
        for p in self.parts:
            out |= p.touch_rects(xlo, xhi, ylo, yhi)
        return out

    def contains(self, x, y):
        out = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)
        for p in self.parts:
            out |= p.contains(x, y)
        return out

    def component_counter(self, x):
        return sum(p.component_counter(x) for p in self.parts)

    def half_plane_chi(self, xi, c):
        return sum(p.half_plane_chi(xi, c) for p in self.parts)

    def boundary_points(self, density):
        return np.concatenate([p.boundary_points(density) for p in self.parts])

    def sample(self, density):
        return np.concatenate([p.sample(density) for p in self.parts])


class Translated(Shape):
    """A shape moved by ``(dx, dy)``; the pixel grid itself never moves."""

    def __init__(self, base: Shape, dx: float, dy: float, name=""):
        self.base, self.dx, self.dy = base, float(dx), float(dy)
        self.name = name or base.name
        self.kind = base.kind
        self.is_curve, self.generic, self.exact = base.is_curve, base.generic, base.exact
        if base.truth is not None:
            t = base.truth
            self.truth = GroundTruth(
                t.b0, t.b1, tuple(j + self.dx for j in t.jumps), t.length, t.curvature,
                t.kappa0_hint, None, t.note,
            )

    def bbox(self):
        x0, x1, y0, y1 = self.base.bbox()
        return (x0 + self.dx, x1 + self.dx, y0 + self.dy, y1 + self.dy)

    def touch_rects(self, xlo, xhi, ylo, yhi):
        return self.base.touch_rects(xlo - self.dx, xhi - self.dx, ylo - self.dy, yhi - self.dy)

    def contains(self, x, y):
        return self.base.contains(np.asarray(x) - self.dx, np.asarray(y) - self.dy)

    def component_counter(self, x):
        return self.base.component_counter(x - self.dx)

    def half_plane_chi(self, xi, c):
        return self.base.half_plane_chi(xi, c - xi[0] * self.dx - xi[1] * self.dy)

    def boundary_points(self, density):
        return self.base.boundary_points(density) + np.array([self.dx, self.dy])

    def sample(self, density):
        return self.base.sample(density) + np.array([self.dx, self.dy])


def touches(shape: Shape, square: tuple[float, float, float, float]) -> bool:
    """Does the closed rectangle ``(x0, x1, y0, y1)`` meet the shape?"""
    x0, x1, y0, y1 = square
    return bool(shape.touch_rects(np.array([x0]), np.array([x1]), np.array([y0]), np.array([y1]))[0, 0])


def component_counter(shape: Shape, x: float) -> int:
    return shape.component_counter(x)


# ---------------------------------------------------------------------------
# ground-truth oracles


def ellipse_perimeter(a: float, b: float) -> float:
    """Perimeter by adaptive quadrature of the speed of ``(a cos t, b sin t)``."""
    val, _ = integrate.quad(lambda t: math.hypot(a * math.sin(t), b * math.cos(t)), 0.0, math.pi / 2,
                            epsabs=1e-13, epsrel=1e-13)
    return 4.0 * val


def _cusp_arc_length() -> float:
    # length of y = x**1.5 over [0, 1]
    val, _ = integrate.quad(lambda x: math.sqrt(1.0 + 2.25 * x), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    return val


def _segment_pair(n: int) -> Segments:
    return Segments([((0.0, 0.0), (float(n), 2.0 * n + 1.0)), ((0.0, 0.0), (1.0, 2.0))], name=f"S{n}")


def _mixed() -> Elementary:
    # bottom is a line; the top pinches onto it over [1, 2] (degenerate stretch)
    line = Polynomial([0.013, 0.1])
    beta = Profile.piecewise_poly([0.0, 3.0], [line])
    tau = Profile.piecewise_poly(
        [0.0, 1.0, 2.0, 3.0],
        [line + Polynomial([0.0, 1.0, -1.0]), line, line + Polynomial([-6.0, 5.0, -1.0])],
    )
    return Elementary(beta, tau, 0.0, 3.0, name="mixed")


def _cusp() -> Elementary:
    tau = Profile(lambda x: np.power(np.maximum(x, 0.0), 1.5))
    beta = Profile(lambda x: -np.power(np.maximum(x, 0.0), 1.5))
    return Elementary(beta, tau, 0.0, 1.0, name="cusp")


def _build_corpus() -> dict[str, Shape]:
    two_pi = 2 * math.pi
    shapes: dict[str, Shape] = {}

    s = Disk(0.0, 0.0, 1.0, name="disk")
    s.truth = GroundTruth(1, 0, (-1.0, 1.0), two_pi, two_pi)
    shapes[s.name] = s

    s = Circle(0.0, 0.0, 1.0, name="circle")
    s.truth = GroundTruth(1, 1, (-1.0, 1.0), 2 * two_pi, 2 * two_pi, note="two-sided length and curvature")
    shapes[s.name] = s

    s = Annulus(0.0, 0.0, 1.0, 2.0, name="annulus")
    s.truth = GroundTruth(1, 1, (-2.0, -1.0, 1.0, 2.0), 3 * two_pi, 2 * two_pi)
    shapes[s.name] = s

    s = Ellipse(0.0, 0.0, 2.0, 1.0, name="ellipse")
    s.truth = GroundTruth(1, 0, (-2.0, 2.0), ellipse_perimeter(2.0, 1.0), two_pi,
                          note="length by adaptive quadrature")
    shapes[s.name] = s

    s = Union([Disk(-1.5, 0.0, 1.0), Disk(1.5, 0.0, 1.0)], name="two_disks")
    s.truth = GroundTruth(2, 0, (-2.5, -0.5, 0.5, 2.5), 2 * two_pi, 2 * two_pi)
    shapes[s.name] = s

    s = PerforatedDisk((0.0, 0.0, 2.0), [(-0.9, 0.0, 0.6), (0.9, 0.0, 0.6)], name="spectacles")
    s.truth = GroundTruth(1, 2, (-2.0, -1.5, -0.3, 0.3, 1.5, 2.0), two_pi * (2.0 + 1.2), 3 * two_pi)
    shapes[s.name] = s

    s = Segments([((0.0, 0.0), (1.0, 1.0)), ((0.0, 0.0), (1.0, 2.0 / 3.0))], name="angle")
    s.truth = GroundTruth(1, 0, (0.0, 1.0), 2 * (math.sqrt(2.0) + math.hypot(1.0, 2.0 / 3.0)), None,
                          pixel_b1=2, note="pixelations are rescalings of each other near the vertex")
    shapes[s.name] = s

    for n in (1, 2, 3):
        s = _segment_pair(n)
        jumps = (0.0, 1.0) if n == 1 else (0.0, 1.0, float(n))
        length = 2 * (math.hypot(n, 2 * n + 1) + math.hypot(1.0, 2.0))
        s.truth = GroundTruth(1, 0, jumps, length, None, pixel_b1=2 * n)
        shapes[s.name] = s

    s = _mixed()
    s.truth = GroundTruth(1, 0, (0.0, 3.0), note="mixed elementary set, degenerate over [1, 2]")
    shapes[s.name] = s

    s = _cusp()
    arc = _cusp_arc_length()
    s.truth = GroundTruth(1, 0, (0.0, 1.0), 2 * arc + 2.0, two_pi + 4 * math.atan(1.5), kappa0_hint=0.5,
                          note="cusp of contact order 3/2; kappa0 hint calibrated, not derived")
    shapes[s.name] = s

    s = Elementary.box(-0.75, 0.75, -0.5, 0.5, name="box")
    s.generic = False
    s.truth = GroundTruth(1, 0, (-0.75, 0.75), 5.0, two_pi, note="vertical edges: not generic")
    shapes[s.name] = s

    return shapes


_CORPUS: dict[str, Shape] | None = None


def corpus() -> list[Shape]:
    global _CORPUS
    if _CORPUS is None:
        _CORPUS = _build_corpus()
    return list(_CORPUS.values())


def get_shape(name: str) -> Shape:
    corpus()
    try:
        return _CORPUS[name]
    except KeyError:
        raise UnknownShape(name) from None


def _jsonable(v) -> bool:
    try:
        json.dumps(v)
    except (TypeError, ValueError):
        return False
    return True


def corpus_manifest() -> str:
    """JSON list of corpus entries: name, kind, parameters and ground truth."""
    entries = []
    for s in corpus():
        params = {k: v for k, v in vars(s).items() if k not in ("name", "truth") and _jsonable(v)}
        entries.append({
            "name": s.name,
            "kind": s.kind,
            "generic": s.generic,
            "curve": s.is_curve,
            "parameters": params,
            "truth": asdict(s.truth) if s.truth else None,
        })
    return json.dumps(entries, indent=2)
