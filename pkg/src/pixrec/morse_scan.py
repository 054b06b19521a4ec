"""Column and stack analysis of a pixelation.

Indices inside this module are 1-based, matching the matrix ``A[i, j]`` of
the algorithm description: column ``k`` of a pixelation is lattice column
``i0 + k - 1`` and row ``r`` is lattice row ``j0 + r - 1``.  Conversion to
real coordinates happens only in :func:`jumping_set` and the helpers on
:class:`ColumnStacks`.
"""
from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grid import Pixelation, rasterize
from .shapes import Elementary, Profile, Union

__all__ = [
    "ColumnStacks",
    "JumpSet",
    "SeparationResult",
    "stack",
    "column_stacks",
    "stack_counter",
    "jump",
    "jump_points",
    "jumping_set",
    "jump_set",
    "hausdorff_1d",
    "separation_check",
    "stacks_to_csv",
]


def stack(column: Sequence[int]) -> list[tuple[int, int]]:
    """Maximal runs of ones as 1-based ``(first, last)`` pairs, bottom to top."""
    c = np.asarray(column, dtype=np.int8)
    if c.size == 0:
        return []
    d = np.diff(np.concatenate(([0], c, [0])))
    starts = np.flatnonzero(d == 1) + 1
    ends = np.flatnonzero(d == -1)
    return list(zip(starts.tolist(), ends.tolist()))


@dataclass(frozen=True)
class ColumnStacks:
    """Per-column stack lists of a pixelation (``runs[k-1]`` is column ``k``)."""

    pixelation: Pixelation
    runs: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def m(self) -> int:
        return len(self.runs)

    @property
    def counts(self) -> np.ndarray:
        return np.array([len(r) for r in self.runs], dtype=np.int64)

    def x_center(self, k: int) -> float:
        spec = self.pixelation.spec
        return spec.column_center(spec.i_range[0] + k - 1)

    def y_center(self, r: int) -> float:
        spec = self.pixelation.spec
        return spec.row_center(spec.j_range[0] + r - 1)

    def column(self, k: int) -> tuple[tuple[int, int], ...]:
        if not 1 <= k <= self.m:
            raise IndexError(f"column {k} outside [1, {self.m}]")
        return self.runs[k - 1]


def column_stacks(p: Pixelation) -> ColumnStacks:
    bits = p.bits
    padded = np.zeros((bits.shape[0], bits.shape[1] + 2), dtype=np.int8)
    padded[:, 1:-1] = bits
    d = np.diff(padded, axis=1)
    si, sj = np.nonzero(d == 1)
    ei, ej = np.nonzero(d == -1)
    # np.nonzero walks row-major, so starts and ends pair up column by column
    runs: list[list[tuple[int, int]]] = [[] for _ in range(bits.shape[0])]
    for k, b, t in zip(si.tolist(), (sj + 1).tolist(), ej.tolist()):
        runs[k].append((b, t))
    return ColumnStacks(p, tuple(tuple(r) for r in runs))


def stack_counter(p: Pixelation) -> np.ndarray:
    """Number of stacks in every column (index ``k-1`` holds column ``k``)."""
    bits = p.bits.astype(np.int8)
    rises = np.diff(bits, axis=1, prepend=0) == 1
    return rises.sum(axis=1).astype(np.int64)


def jump(k: int, counters: Sequence[int]) -> int:
    """Smallest ``i >= k`` with ``n_i != n_{i+1}``; ``m + 1`` when there is none."""
    m = len(counters)
    if not 1 <= k < m:
        raise IndexError(f"k={k} outside [1, {m})")
    n = np.asarray(counters)
    hits = np.flatnonzero(n[k - 1:-1] != n[k:])
    return int(hits[0]) + k if hits.size else m + 1


def jump_points(counters: Sequence[int]) -> list[int]:
    """All 1-based jump points ``i`` in ``[1, m)``."""
    n = np.asarray(counters)
    return (np.flatnonzero(n[:-1] != n[1:]) + 1).tolist()


def jumping_set(p: Pixelation) -> list[float]:
    """The discrete jumping set as real x-coordinates.

    A jump between columns ``k`` and ``k+1`` is reported at the center of
    column ``k+1``, the point ``x0`` with ``n(x0 - eps) != n(x0)``.
    """
    spec = p.spec
    i0 = spec.i_range[0]
    return [spec.column_center(i0 + k) for k in jump_points(stack_counter(p))]


@dataclass(frozen=True)
class JumpSet:
    analytic: tuple[float, ...]
    discrete: tuple[float, ...]


def jump_set(shape, p: Pixelation) -> JumpSet:
    return JumpSet(tuple(shape.truth.jumps), tuple(jumping_set(p)))


def hausdorff_1d(a: Sequence[float], b: Sequence[float]) -> float:
    if not len(a) and not len(b):
        return 0.0
    if not len(a) or not len(b):
        return math.inf
    sb = sorted(b)
    sa = sorted(a)

    def one_way(xs, ys):
        worst = 0.0
        for x in xs:
            k = bisect.bisect_left(ys, x)
            best = min(abs(x - ys[j]) for j in (k - 1, k) if 0 <= j < len(ys))
            worst = max(worst, best)
        return worst

    return max(one_way(sa, sb), one_way(sb, sa))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationResult:
    applicable: bool
    gap: float
    bound: float
    columns: tuple[tuple[float, int], ...] = ()

    @property
    def ok(self) -> bool | None:
        """True when every tested column has exactly two stacks; None when not applicable."""
        if not self.applicable:
            return None
        return all(n == 2 for _, n in self.columns)


def separation_check(
    f: Profile | Callable,
    g: Profile | Callable,
    a: float,
    b: float,
    eps: float,
    L: float,
    alpha: float = 1.0,
    min_gap: float | None = None,
) -> SeparationResult:
    """Count stacks over the eps-generic columns of ``P_eps(graph f ∪ graph g)``.

    ``f`` and ``g`` should be :class:`Profile` objects so the graphs can be
    rasterized exactly; plain callables are treated as monotone between
    their endpoints.  When ``min_gap`` is not given it is estimated by dense
    sampling.  The check is reported not applicable when
    ``3 eps + L eps**alpha >= min(g - f)``.
    """
    f = f if isinstance(f, Profile) else Profile(f)
    g = g if isinstance(g, Profile) else Profile(g)
    if min_gap is None:
        xs = np.linspace(a, b, 20001)
        min_gap = float(np.min(g(xs) - f(xs)))
    bound = 3 * eps + L * eps ** alpha
    if not bound < min_gap:
        return SeparationResult(False, min_gap, bound)
    shape = Union([Elementary.graph(f, a, b), Elementary.graph(g, a, b)])
    p = rasterize(shape, eps)
    counts = stack_counter(p)
    i0 = p.spec.i_range[0]
    cols = []
    for k, n in enumerate(counts.tolist()):
        i = i0 + k
        lo, hi = (i - 1) * eps, i * eps
        # the open strip (lo, hi) must meet (a, b)
        if hi > a and lo < b:
            cols.append((p.spec.column_center(i), n))
    return SeparationResult(True, min_gap, bound, tuple(cols))


def stacks_to_csv(cs: ColumnStacks) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "n_i", "stacks"])
    for k, runs in enumerate(cs.runs, start=1):
        w.writerow([k, len(runs), ";".join(f"{b}:{t}" for b, t in runs)])
    return buf.getvalue()
