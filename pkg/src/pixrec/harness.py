"""Experiment driver: resolution sweeps, convergence tables and diagnostics."""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import NonGenericLine, ResolutionTooCoarse
from .grid import rasterize
from .measures import MeasureReport, half_plane_chi, hausdorff_distance, measure
from .morse_scan import hausdorff_1d, jumping_set
from .recover import ApproxConfig, Polytrapezoid, approximate, default_schedule
from .shapes import GroundTruth, Shape, get_shape

__all__ = [
    "RunConfig",
    "ConvergenceTable",
    "HalfPlaneSample",
    "JumpRow",
    "output_dir",
    "schedule_for",
    "run_one",
    "random_half_planes",
    "half_plane_check",
    "converge",
    "jumpscan",
    "jumpscan_to_csv",
]

VERTICAL_BAND = 1e-3


def output_dir(default: str | os.PathLike = "pixrec_out") -> Path:
    return Path(os.environ.get("PIXREC_OUT", default))


@dataclass
class RunConfig:
    shape: str
    eps_list: Sequence[float] = (2.0 ** -4, 2.0 ** -5, 2.0 ** -6, 2.0 ** -7, 2.0 ** -8, 2.0 ** -9)
    kappa0: float = 0.5
    sigma: int | None = None
    nu: int | None = None
    out_dir: Path | None = None
    seed: int = 0
    supersample: int | None = None
    n_half_planes: int = 50

    def __post_init__(self):
        eps = [float(e) for e in self.eps_list]
        for e in eps:
            if not 0 < e < 1:
                raise ResolutionTooCoarse(f"resolution must lie in (0, 1), got {e}")
        if len(set(eps)) != len(eps):
            raise ValueError("resolutions must be distinct")
        self.eps_list = tuple(sorted(eps, reverse=True))
        self.out_dir = Path(self.out_dir) if self.out_dir else output_dir()


def schedule_for(cfg: RunConfig, eps: float) -> ApproxConfig:
    base = default_schedule(eps, cfg.kappa0)
    return ApproxConfig(cfg.sigma or base.sigma, cfg.nu or base.nu, cfg.kappa0)


def run_one(shape: Shape, eps: float, sched: ApproxConfig, supersample: int | None = None,
            hausdorff: bool = True) -> tuple[Polytrapezoid, MeasureReport]:
    p = rasterize(shape, eps, supersample=supersample)
    P = approximate(p, sched)
    dh = hausdorff_distance(P, shape, eps) if hausdorff and not P.is_empty else math.nan
    return P, measure(P, shape.name, eps, sched.sigma, sched.nu, dh)


# ---------------------------------------------------------------------------
# half-plane diagnostics


@dataclass(frozen=True)
class HalfPlaneSample:
    xi: tuple[float, float]
    c: float
    got: int
    want: int
    near_tangent: bool

    @property
    def ok(self) -> bool:
        return self.got == self.want


def _xi_range(shape: Shape, xi, density: float) -> tuple[float, float]:
    pts = shape.boundary_points(density)
    v = pts @ np.asarray(xi)
    return float(v.min()), float(v.max())


def random_half_planes(shape: Shape, seed: int, density: float = 1e-3):
    """Endless generator of ``(xi, c)``: directions uniform on the circle minus a band around vertical lines.

    The band excludes directions whose line ``{xi = c}`` is within
    ``VERTICAL_BAND`` radians of vertical; offsets are uniform over the
    interior of the shape's ``xi``-range.
    """
    rng = np.random.default_rng(seed)
    while True:
        theta = rng.uniform(0.0, 2 * math.pi)
        # the line is vertical when xi is horizontal
        if abs(math.sin(theta)) < math.sin(VERTICAL_BAND):
            continue
        xi = (math.cos(theta), math.sin(theta))
        lo, hi = _xi_range(shape, xi, density)
        c = float(rng.uniform(lo, hi))
        yield xi, c


def _near_tangent(shape: Shape, xi, c: float, radius: float, probes: int = 9) -> bool:
    """Whether the oracle's chi changes for offsets within ``radius`` of ``c``."""
    vals = {shape.half_plane_chi(xi, cc) for cc in np.linspace(c - radius, c + radius, probes)}
    return len(vals) > 1


def half_plane_check(shape: Shape, P: Polytrapezoid, eps: float, n: int = 50, seed: int = 0) -> list[HalfPlaneSample]:
    """Compare ``chi(S_eps ∩ H)`` with the analytic ``chi(S ∩ H)`` on ``n`` seeded generic half-planes."""
    out = []
    for xi, c in random_half_planes(shape, seed):
        try:
            got = half_plane_chi(P, xi, c)
        except NonGenericLine:
            continue
        want = shape.half_plane_chi(xi, c)
        out.append(HalfPlaneSample(xi, c, got, want, _near_tangent(shape, xi, c, 2 * eps)))
        if len(out) == n:
            return out
    return out


# ---------------------------------------------------------------------------


def _rel(measured: float, truth: float | None) -> float:
    if truth is None or measured is None or (isinstance(measured, float) and math.isnan(measured)):
        return math.nan
    return abs(measured - truth) / max(abs(truth), 1.0)


@dataclass
class ConvergenceTable:
    shape: str
    truth: GroundTruth
    rows: list[MeasureReport] = field(default_factory=list)
    half_plane_agreement: list[float] = field(default_factory=list)

    def errors(self, attr: str) -> list[float]:
        return [_rel(getattr(r, attr), getattr(self.truth, attr)) for r in self.rows]

    def mass(self) -> list[float]:
        return [r.mass_proxy for r in self.rows]

    def topology_ok(self) -> list[bool]:
        t = self.truth
        return [(r.b0, r.b1, r.chi) == (t.b0, t.b1, t.chi) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["shape", "epsilon", "sigma", "nu", "length", "curvature", "chi", "b0", "b1", "hausdorff",
                    "mass", "rel_err_length", "rel_err_curvature", "rel_err_chi", "half_plane_agreement"])
        t = self.truth
        w.writerow([self.shape, "truth", "", "", t.length if t.length is not None else "",
                    t.curvature if t.curvature is not None else "", t.chi, t.b0, t.b1, 0.0, "", "", "", "", ""])
        agree = self.half_plane_agreement or [math.nan] * len(self.rows)
        for r, a in zip(self.rows, agree):
            w.writerow([r.shape, repr(r.epsilon), r.sigma, r.nu, r.length, r.curvature, r.chi, r.b0, r.b1,
                        r.hausdorff, r.mass_proxy, _rel(r.length, t.length), _rel(r.curvature, t.curvature),
                        _rel(r.chi, t.chi), a])
        return buf.getvalue()


def _row(cfg: RunConfig, eps: float, half_planes: bool) -> tuple[MeasureReport, float]:
    shape = get_shape(cfg.shape)
    P, rep = run_one(shape, eps, schedule_for(cfg, eps), cfg.supersample)
    agree = math.nan
    if half_planes:
        hs = half_plane_check(shape, P, eps, cfg.n_half_planes, cfg.seed)
        agree = sum(h.ok for h in hs) / max(len(hs), 1)
    return rep, agree


def converge(cfg: RunConfig, half_planes: bool = True, workers: int = 1) -> ConvergenceTable:
    """One row per resolution; rows are independent and may run in ``workers`` processes."""
    shape = get_shape(cfg.shape)
    table = ConvergenceTable(shape.name, shape.truth)
    n = len(cfg.eps_list)
    args = ([cfg] * n, list(cfg.eps_list), [half_planes] * n)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_row, *args))
    else:
        rows = list(map(_row, *args))
    for rep, agree in rows:
        table.rows.append(rep)
        if half_planes:
            table.half_plane_agreement.append(agree)
    return table


@dataclass(frozen=True)
class JumpRow:
    epsilon: float
    distance: float
    ratio: float
    covered: bool


def jumpscan(shape: Shape, eps_list: Sequence[float], kappa0: float = 0.5, nu0: float | None = None) -> list[JumpRow]:
    """Hausdorff distance between analytic and discrete jump sets per resolution.

    ``covered`` says whether every analytic jump has a discrete jump within
    ``nu0 * eps**kappa0`` (always true when ``nu0`` is None).
    """
    rows = []
    for eps in eps_list:
        disc = jumping_set(rasterize(shape, eps))
        d = hausdorff_1d(shape.truth.jumps, disc)
        covered = True
        if nu0 is not None:
            r = nu0 * eps ** kappa0
            covered = all(any(abs(a - x) <= r for x in disc) for a in shape.truth.jumps)
        rows.append(JumpRow(eps, d, d / eps ** kappa0, covered))
    return rows


def jumpscan_to_csv(rows: Sequence[JumpRow], kappa0: float = 0.5) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["epsilon", "dist_H", f"dist_H/eps^{kappa0:g}"])
    for r in rows:
        w.writerow([repr(r.epsilon), r.distance, r.ratio])
    return buf.getvalue()
