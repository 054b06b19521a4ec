"""Reconstruction of a PL set from a pixelation.

The pipeline: stack counts per column, jump points, noise intervals of
half-width ``2 nu`` columns around the jumps, then

* over each regular interval, one strip per stack, bounded below and above
  by PL interpolation of the bottom/top pixel centers at sample columns
  spaced ``sigma`` apart;
* over each noise interval, one rectangle per stack of the OR-merged
  column, spanning the centers of the interval's first and last columns.

The union is returned as a :class:`Polytrapezoid`: increasing x
breakpoints, and for every slab between consecutive breakpoints a
bottom-to-top list of pairwise disjoint trapezoids with vertical bases.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidInterval, InvariantViolation, ResolutionTooCoarse
from .grid import Pixelation
from .morse_scan import ColumnStacks, column_stacks, jump_points, stack

__all__ = [
    "ApproxConfig",
    "IntervalPartition",
    "Trapezoid",
    "Polytrapezoid",
    "Strip",
    "ProfileSample",
    "Reconstruction",
    "default_schedule",
    "noise_intervals",
    "sample_indices",
    "regular_piece",
    "noise_piece",
    "noise_zeta",
    "reconstruct",
    "approximate",
    "to_svg",
]


@dataclass(frozen=True)
class ApproxConfig:
    sigma: int
    nu: int
    kappa0: float = 0.5

    def __post_init__(self):
        if int(self.sigma) != self.sigma or self.sigma < 1:
            raise ValueError(f"sigma must be a positive integer, got {self.sigma}")
        if int(self.nu) != self.nu or self.nu < 1:
            raise ValueError(f"nu must be a positive integer, got {self.nu}")
        if not 0 < self.kappa0 <= 1:
            raise ValueError(f"kappa0 must lie in (0, 1], got {self.kappa0}")


def _ceil_power(eps: float, expo: float) -> int:
    v = eps ** expo
    r = round(v)
    # eps = 2**-6 gives 16.000000000000004; do not let rounding noise bump the ceiling
    if abs(v - r) <= 1e-9 * max(1.0, v):
        return int(r)
    return int(math.ceil(v))


def default_schedule(eps: float, kappa0: float = 0.5) -> ApproxConfig:
    """``sigma = nu = ceil(eps^(-2/3))``.

    With ``kappa0 = 1/2`` this satisfies ``eps*sigma -> 0``,
    ``eps*sigma^2 -> inf``, ``eps*nu -> 0`` and ``eps*nu / eps^kappa0 -> inf``.
    """
    if not 0 < eps < 1:
        raise ResolutionTooCoarse(f"resolution must lie in (0, 1), got {eps}")
    n = _ceil_power(eps, -2.0 / 3.0)
    return ApproxConfig(n, n, kappa0)


@dataclass(frozen=True)
class IntervalPartition:
    noise: tuple[tuple[int, int], ...]
    regular: tuple[tuple[int, int], ...]


def noise_intervals(jumps: Sequence[int], nu: int, m: int) -> IntervalPartition:
    """Noise intervals ``[jump - 2nu, jump + 2nu]`` (clipped to ``[1, m]``), chained and merged.

    Starting from ``jump(1)``, each next interval is centered at the first
    jump point at or after the previous right end; overlapping intervals
    merge.  Regular intervals are the closed complement and share their
    endpoint columns with the neighbouring noise intervals.
    """
    js = sorted(jumps)

    def nxt(k: int) -> int:
        pos = bisect_left(js, k)
        return js[pos] if pos < len(js) and js[pos] < m else m + 1

    raw = []
    if js:
        c = nxt(1)
        while c <= m:
            lo, hi = max(c - 2 * nu, 1), min(m, c + 2 * nu)
            raw.append((lo, hi))
            if hi >= m:
                break
            c = nxt(hi)
    noise: list[tuple[int, int]] = []
    for lo, hi in raw:
        if noise and lo <= noise[-1][1]:
            noise[-1] = (noise[-1][0], max(hi, noise[-1][1]))
        else:
            noise.append((lo, hi))
    regular = []
    left = 1
    for lo, hi in noise:
        if lo > left:
            regular.append((left, lo))
        left = hi
    if left < m:
        regular.append((left, m))
    if not noise:
        regular = [(1, m)]
    return IntervalPartition(tuple(noise), tuple(regular))


def bisect_left(a, x):
    lo, hi = 0, len(a)
    while lo < hi:
        mid = (lo + hi) // 2
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def sample_indices(p: int, q: int, sigma: int) -> list[int]:
    """Sample columns ``p = i_0 < ... < i_N = q``: steps of ``sigma``, last step in ``[sigma, 2 sigma)``."""
    if p > q:
        raise InvalidInterval(f"p={p} > q={q}")
    if p == q:
        return [p]
    out = [p]
    while q - out[-1] >= 2 * sigma:
        out.append(out[-1] + sigma)
    out.append(q)
    return out


@dataclass(frozen=True)
class Trapezoid:
    """Vertical-based trapezoid; the x-extent comes from its slab."""

    ybl: float
    ytl: float
    ybr: float
    ytr: float

    def as_dict(self) -> dict:
        return {"ybl": self.ybl, "ytl": self.ytl, "ybr": self.ybr, "ytr": self.ytr}


@dataclass(frozen=True)
class Polytrapezoid:
    breakpoints: tuple[float, ...] = ()
    slabs: tuple[tuple[Trapezoid, ...], ...] = ()

    def __post_init__(self):
        if self.breakpoints and len(self.slabs) != len(self.breakpoints) - 1:
            raise InvariantViolation("need one slab per consecutive breakpoint pair")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise InvariantViolation("breakpoints must increase strictly")
        for s, slab in enumerate(self.slabs):
            for t in slab:
                if t.ybl > t.ytl or t.ybr > t.ytr:
                    raise InvariantViolation(f"inverted trapezoid in slab {s}: {t}")
            for lo, hi in zip(slab, slab[1:]):
                if not (lo.ytl < hi.ybl and lo.ytr < hi.ybr):
                    raise InvariantViolation(f"overlapping or unordered trapezoids in slab {s}")

    @property
    def is_empty(self) -> bool:
        return not any(self.slabs)

    def pieces(self) -> Iterator[tuple[int, float, float, Trapezoid]]:
        for s, slab in enumerate(self.slabs):
            xl, xr = self.breakpoints[s], self.breakpoints[s + 1]
            for t in slab:
                yield s, xl, xr, t

    def n_pieces(self) -> int:
        return sum(len(s) for s in self.slabs)

    def vertices(self) -> set[tuple[float, float]]:
        out = set()
        for _, xl, xr, t in self.pieces():
            out.update({(xl, t.ybl), (xl, t.ytl), (xr, t.ybr), (xr, t.ytr)})
        return out

    def bbox(self) -> tuple[float, float, float, float]:
        pts = np.array(sorted(self.vertices()))
        return (pts[:, 0].min(), pts[:, 0].max(), pts[:, 1].min(), pts[:, 1].max())

    def translated(self, dx: float, dy: float) -> "Polytrapezoid":
        return Polytrapezoid(
            tuple(b + dx for b in self.breakpoints),
            tuple(tuple(Trapezoid(t.ybl + dy, t.ytl + dy, t.ybr + dy, t.ytr + dy) for t in s) for s in self.slabs),
        )

    def to_json(self) -> str:
        return json.dumps({
            "breakpoints": list(self.breakpoints),
            "slabs": [[t.as_dict() for t in s] for s in self.slabs],
        })

    @classmethod
    def from_json(cls, text: str) -> "Polytrapezoid":
        d = json.loads(text)
        return cls(
            tuple(float(b) for b in d["breakpoints"]),
            tuple(tuple(Trapezoid(float(t["ybl"]), float(t["ytl"]), float(t["ybr"]), float(t["ytr"])) for t in s)
                  for s in d["slabs"]),
        )

    @classmethod
    def from_pieces(cls, pieces: Sequence[tuple[float, float, Trapezoid]]) -> "Polytrapezoid":
        """Normalize ``(x_left, x_right, trapezoid)`` pieces into the slab complex.

        Each piece must span exactly one slab of the resulting breakpoint set.
        Zero-width pieces are vertical segments and are dropped; callers only
        produce them where they lie on an edge of a neighbouring piece.
        """
        pieces = [pc for pc in pieces if pc[1] > pc[0]]
        if not pieces:
            return cls()
        bps = sorted({x for xl, xr, _ in pieces for x in (xl, xr)})
        where = {x: n for n, x in enumerate(bps)}
        slabs: list[list[Trapezoid]] = [[] for _ in range(len(bps) - 1)]
        for xl, xr, t in pieces:
            s = where[xl]
            if where[xr] != s + 1:
                raise InvariantViolation(f"piece over [{xl}, {xr}] spans several slabs")
            slabs[s].append(t)
        for s in slabs:
            s.sort(key=lambda t: (t.ybl + t.ybr, t.ytl + t.ytr))
        return cls(tuple(bps), tuple(tuple(s) for s in slabs))


@dataclass(frozen=True)
class Strip:
    """PL approximation of one stack over a regular interval.

    ``xs`` are the sample abscissae; ``bottoms``/``tops`` the centers of the
    lowest/highest pixel of the stack in each sample column.
    """

    xs: tuple[float, ...]
    bottoms: tuple[float, ...]
    tops: tuple[float, ...]

    def polygon(self) -> list[tuple[float, float]]:
        """``B_0, ..., B_N, T_N, ..., T_0`` (closed implicitly back to ``B_0``)."""
        lower = list(zip(self.xs, self.bottoms))
        upper = list(zip(self.xs, self.tops))[::-1]
        return lower + upper

    def trapezoids(self) -> list[tuple[float, float, Trapezoid]]:
        return [
            (self.xs[k - 1], self.xs[k], Trapezoid(self.bottoms[k - 1], self.tops[k - 1], self.bottoms[k], self.tops[k]))
            for k in range(1, len(self.xs))
        ]

    def sample(self) -> "ProfileSample":
        return ProfileSample(
            tuple(zip(self.xs, self.bottoms)), tuple(zip(self.xs, self.tops))
        )


@dataclass(frozen=True)
class ProfileSample:
    bottom: tuple[tuple[float, float], ...]
    top: tuple[tuple[float, float], ...]


def _as_stacks(p) -> ColumnStacks:
    return p if isinstance(p, ColumnStacks) else column_stacks(p)


def regular_piece(p, interval: tuple[int, int], sigma: int, j: int) -> Strip:
    """Strip of the ``j``-th stack (1-based, from the bottom) over a regular interval."""
    cs = _as_stacks(p)
    lo, hi = interval
    counts = {len(cs.column(k)) for k in range(lo, hi + 1)}
    if len(counts) != 1:
        raise InvariantViolation(f"stack count not constant over regular interval {interval}: {sorted(counts)}")
    (n,) = counts
    if not 1 <= j <= n:
        raise IndexError(f"stack {j} outside [1, {n}]")
    ks = sample_indices(lo, hi, sigma)
    xs, bs, ts = [], [], []
    for k in ks:
        b, t = cs.column(k)[j - 1]
        xs.append(cs.x_center(k))
        bs.append(cs.y_center(b))
        ts.append(cs.y_center(t))
    return Strip(tuple(xs), tuple(bs), tuple(ts))


def noise_piece(p, interval: tuple[int, int]) -> list[tuple[float, float, float, float]]:
    """Rectangles ``(x_left, x_right, y_bottom, y_top)`` covering a noise interval.

    All columns of the interval are OR-ed into one; each stack of the merged
    column gives a rectangle between its bottom and top pixel centers,
    spanning the centers of the interval's first and last columns.
    """
    cs = _as_stacks(p)
    lo, hi = interval
    if lo > hi:
        raise InvalidInterval(f"empty interval {interval}")
    bits = cs.pixelation.bits[lo - 1:hi].any(axis=0)
    # columns outside the occupied range are grid padding; the x-extent must not depend on it
    occ = np.flatnonzero(cs.counts) + 1
    if occ.size == 0:
        return []
    first, last = int(occ[0]), int(occ[-1])
    if lo > last or hi < first:
        return []
    half = cs.pixelation.spec.epsilon / 2
    # a clipped end stops at the outer edge of the occupied pixel, not its center
    xl = cs.x_center(first) - half if lo < first else cs.x_center(lo)
    xr = cs.x_center(last) + half if hi > last else cs.x_center(hi)
    return [(xl, xr, cs.y_center(b), cs.y_center(t)) for b, t in stack(bits)]


def noise_zeta(point: float, eps: float, nu: int) -> tuple[float, float]:
    """Continuous-coordinate ends of the noise interval around a discrete jump ``point``."""
    lo = -eps * nu + eps * math.floor(point / eps) - eps / 2
    hi = eps * nu + eps * math.ceil(point / eps) + eps / 2
    return lo, hi


@dataclass(frozen=True)
class Reconstruction:
    pixelation: Pixelation
    config: ApproxConfig
    stacks: ColumnStacks
    partition: IntervalPartition
    strips: tuple[Strip, ...]
    rectangles: tuple[tuple[float, float, float, float], ...]
    polytrapezoid: Polytrapezoid = field(repr=False)


def reconstruct(p: Pixelation, cfg: ApproxConfig | None = None) -> Reconstruction:
    cfg = cfg or default_schedule(p.epsilon)
    cs = column_stacks(p)
    counts = cs.counts
    m = cs.m
    part = noise_intervals(jump_points(counts), cfg.nu, m)
    strips: list[Strip] = []
    for lo, hi in part.regular:
        seg = counts[lo - 1:hi]
        if np.any(seg != seg[0]):
            raise InvariantViolation(f"stack count not constant over regular interval {(lo, hi)}")
        if lo == hi:
            # a lone end column; its stacks lie on the edge of the adjacent noise rectangle
            continue
        for j in range(1, int(seg[0]) + 1):
            strips.append(regular_piece(cs, (lo, hi), cfg.sigma, j))
    rects: list[tuple[float, float, float, float]] = []
    for iv in part.noise:
        rects.extend(noise_piece(cs, iv))
    pieces = [pc for s in strips for pc in s.trapezoids()]
    pieces += [(xl, xr, Trapezoid(yb, yt, yb, yt)) for xl, xr, yb, yt in rects]
    poly = Polytrapezoid.from_pieces(pieces)
    return Reconstruction(p, cfg, cs, part, tuple(strips), tuple(rects), poly)


def approximate(p: Pixelation, cfg: ApproxConfig | None = None) -> Polytrapezoid:
    """The reconstructed PL set ``S_eps`` as a polytrapezoid (empty for an empty pixelation)."""
    if len(p) == 0:
        return Polytrapezoid()
    return reconstruct(p, cfg).polytrapezoid


def to_svg(rec: Reconstruction, scale: float | None = None) -> str:
    """Pixelation in light gray, ``S_eps`` filled, noise rectangles outlined."""
    p = rec.pixelation
    eps = p.epsilon
    spec = p.spec
    x0, y0 = (spec.i_range[0] - 1) * eps, (spec.j_range[0] - 1) * eps
    ni, nj = spec.shape
    w, h = ni * eps, nj * eps
    scale = scale or 800.0 / max(w, h)

    def X(x):
        return f"{(x - x0) * scale:.3f}"

    def Y(y):
        return f"{(y0 + h - y) * scale:.3f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * scale:.0f}" height="{h * scale:.0f}">',
        '<g id="pixels" fill="#dddddd" stroke="none">',
    ]
    ii, jj = np.nonzero(p.bits)
    s = eps * scale
    for a, b in zip(ii.tolist(), jj.tolist()):
        px = (spec.i_range[0] + a - 1) * eps
        py = (spec.j_range[0] + b) * eps
        out.append(f'<rect x="{X(px)}" y="{Y(py)}" width="{s:.3f}" height="{s:.3f}"/>')
    out.append("</g>")
    out.append('<g id="approximation" fill="#3366cc" fill-opacity="0.6" stroke="#3366cc" stroke-width="1">')
    for _, xl, xr, t in rec.polytrapezoid.pieces():
        pts = [(xl, t.ybl), (xr, t.ybr), (xr, t.ytr), (xl, t.ytl)]
        out.append('<polygon points="' + " ".join(f"{X(x)},{Y(y)}" for x, y in pts) + '"/>')
    out.append("</g>")
    out.append('<g id="noise" fill="none" stroke="#cc3333" stroke-width="2">')
    for xl, xr, yb, yt in rec.rectangles:
        out.append(
            f'<rect x="{X(xl)}" y="{Y(yt)}" width="{(xr - xl) * scale:.3f}" height="{(yt - yb) * scale:.3f}"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
