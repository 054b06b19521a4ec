"""Pixelations: data model, conservative rasterization and cubical topology.

Pixel ``(i, j)`` at resolution ``eps`` is the closed square
``[(i-1)eps, i*eps] x [(j-1)eps, j*eps]``.  A :class:`Pixelation` stores its
occupancy as a boolean array indexed ``[i - i0, j - j0]`` so that the first
axis runs over columns.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import CorruptInput, GridTooLarge, InvalidResolution, UnboundedShape

__all__ = [
    "GridSpec",
    "Pixelation",
    "CubicalMeasures",
    "pixel_center",
    "rasterize",
    "rasterize_supersampled",
    "cubical_measures",
    "count_holes",
    "column_bits",
    "write_pbm",
    "read_pbm",
]

MAX_CELLS = 60_000_000


@dataclass(frozen=True)
class GridSpec:
    epsilon: float
    i_range: tuple[int, int]
    j_range: tuple[int, int]

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidResolution(f"epsilon must be positive, got {self.epsilon}")
        if self.i_range[1] < self.i_range[0] or self.j_range[1] < self.j_range[0]:
            raise ValueError("empty index range")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.i_range[1] - self.i_range[0] + 1, self.j_range[1] - self.j_range[0] + 1)

    def column_center(self, i: int) -> float:
        return i * self.epsilon - self.epsilon / 2

    def row_center(self, j: int) -> float:
        return j * self.epsilon - self.epsilon / 2


class Pixelation:
    """A finite union of closed eps-pixels on the fixed lattice."""

    __slots__ = ("spec", "bits", "approximate")

    def __init__(self, spec: GridSpec, bits: np.ndarray, approximate: bool = False):
        bits = np.ascontiguousarray(bits, dtype=bool)
        if bits.shape != spec.shape:
            raise ValueError(f"bit array {bits.shape} does not match grid {spec.shape}")
        bits.flags.writeable = False
        self.spec = spec
        self.bits = bits
        self.approximate = approximate

    @classmethod
    def from_occupied(cls, spec: GridSpec, occupied) -> "Pixelation":
        bits = np.zeros(spec.shape, dtype=bool)
        i0, j0 = spec.i_range[0], spec.j_range[0]
        for i, j in occupied:
            if not (spec.i_range[0] <= i <= spec.i_range[1] and spec.j_range[0] <= j <= spec.j_range[1]):
                raise IndexError(f"pixel {(i, j)} outside grid")
            bits[i - i0, j - j0] = True
        return cls(spec, bits)

    @property
    def epsilon(self) -> float:
        return self.spec.epsilon

    @property
    def occupied(self) -> frozenset[tuple[int, int]]:
        i0, j0 = self.spec.i_range[0], self.spec.j_range[0]
        ii, jj = np.nonzero(self.bits)
        return frozenset(zip((ii + i0).tolist(), (jj + j0).tolist()))

    @property
    def n_columns(self) -> int:
        return self.bits.shape[0]

    def __len__(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pixelation):
            return NotImplemented
        return self.occupied == other.occupied and self.epsilon == other.epsilon

    def __repr__(self) -> str:
        return f"Pixelation(eps={self.epsilon}, grid={self.spec.shape}, pixels={len(self)})"


@dataclass(frozen=True)
class CubicalMeasures:
    vertices: int
    edges: int
    faces: int
    chi: int
    b0: int
    b1: int


def pixel_center(i: int, j: int, eps: float) -> tuple[float, float]:
    if not eps > 0:
        raise InvalidResolution(f"epsilon must be positive, got {eps}")
    return (i * eps - eps / 2, j * eps - eps / 2)


def _grid_for(shape, eps: float) -> GridSpec:
    if not eps > 0:
        raise InvalidResolution(f"epsilon must be positive, got {eps}")
    box = shape.bbox()
    if not all(math.isfinite(v) for v in box):
        raise UnboundedShape(f"{shape!r} has an unbounded bounding box")
    xmin, xmax, ymin, ymax = box
    # pixel i covers [(i-1)eps, i eps]; keep at least one empty pixel of margin on each side
    spec = GridSpec(
        eps,
        (math.floor(xmin / eps) - 1, math.ceil(xmax / eps) + 2),
        (math.floor(ymin / eps) - 1, math.ceil(ymax / eps) + 2),
    )
    ni, nj = spec.shape
    if ni * nj > MAX_CELLS:
        raise GridTooLarge(f"{ni} x {nj} grid exceeds {MAX_CELLS} cells")
    return spec


def rasterize(shape, eps: float, supersample: int | None = None) -> Pixelation:
    """The pixelation ``P_eps(S)``: every closed pixel meeting the shape.

    Exact for the analytic primitives.  Shapes without an exact touch test
    (and callers passing ``supersample``) go through
    :func:`rasterize_supersampled` and the result is flagged approximate.
    """
    spec = _grid_for(shape, eps)
    if supersample is not None or not getattr(shape, "exact", True):
        return rasterize_supersampled(shape, eps, supersample or 8, spec=spec)
    return Pixelation(spec, shape.touch_grid(eps, spec.i_range, spec.j_range))


def rasterize_supersampled(shape, eps: float, k: int = 8, spec: GridSpec | None = None) -> Pixelation:
    """Mark a pixel when any of the ``(k+1)^2`` lattice samples of the closed pixel lies in the shape.

    Sampling can only miss contacts (tangencies, thin features); it never
    marks a pixel the shape does not touch.
    """
    spec = spec or _grid_for(shape, eps)
    ni, nj = spec.shape
    i0, j0 = spec.i_range[0], spec.j_range[0]
    offs = np.linspace(0.0, eps, k + 1)
    xs = ((np.arange(ni) + i0 - 1) * eps)[:, None] + offs[None, :]
    ys = ((np.arange(nj) + j0 - 1) * eps)[:, None] + offs[None, :]
    bits = np.zeros((ni, nj), dtype=bool)
    for a in range(k + 1):
        for b in range(k + 1):
            bits |= shape.contains(xs[:, a][:, None], ys[:, b][None, :])
    return Pixelation(spec, bits, approximate=True)


def _padded(bits: np.ndarray) -> np.ndarray:
    return np.pad(bits, 1, constant_values=False)


def cubical_measures(p: Pixelation) -> CubicalMeasures:
    """Vertex/edge/face counts and Betti numbers of the union of closed pixels."""
    b = _padded(p.bits)
    faces = int(b.sum())
    # lattice vertex (a, c) is the corner shared by cells (a-1..a, c-1..c) of the padded array
    v = b[:-1, :-1] | b[1:, :-1] | b[:-1, 1:] | b[1:, 1:]
    # vertical unit edges sit between horizontally adjacent cells' shared column line
    e_vert = b[:-1, :] | b[1:, :]
    e_horz = b[:, :-1] | b[:, 1:]
    vertices = int(v.sum())
    edges = int(e_vert.sum() + e_horz.sum())
    chi = vertices - edges + faces
    _, b0 = ndimage.label(p.bits, structure=np.ones((3, 3), dtype=bool))
    return CubicalMeasures(vertices, edges, faces, chi, int(b0), int(b0) - chi)


def count_holes(bits: np.ndarray) -> int:
    """Bounded components of the complement of a union of closed pixels.

    Empty cells touching only at a corner are separated (the corner belongs
    to the closed union), hence 4-connectivity on the complement.  Written
    as a plain flood fill so it stays independent of :func:`cubical_measures`.
    """
    free = ~_padded(np.asarray(bits, dtype=bool))
    seen = np.zeros_like(free)
    ni, nj = free.shape
    holes = 0
    for si in range(ni):
        for sj in range(nj):
            if not free[si, sj] or seen[si, sj]:
                continue
            bounded = True
            stack = [(si, sj)]
            seen[si, sj] = True
            while stack:
                a, c = stack.pop()
                if a == 0 or c == 0 or a == ni - 1 or c == nj - 1:
                    bounded = False
                for da, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    x, y = a + da, c + dc
                    if 0 <= x < ni and 0 <= y < nj and free[x, y] and not seen[x, y]:
                        seen[x, y] = True
                        stack.append((x, y))
            holes += bounded
    return holes


def column_bits(p: Pixelation, i: int) -> list[int]:
    """Occupancy of column ``i`` (a lattice column index) in increasing ``j``."""
    lo, hi = p.spec.i_range
    if not lo <= i <= hi:
        raise IndexError(f"column {i} outside [{lo}, {hi}]")
    return p.bits[i - lo].astype(int).tolist()


# ---------------------------------------------------------------------------
# plain PBM (P1) with a JSON sidecar; PBM row 1 is the highest j


def write_pbm(p: Pixelation, pbm_path, meta_path=None) -> None:
    pbm_path = Path(pbm_path)
    meta_path = Path(meta_path) if meta_path else pbm_path.with_suffix(".json")
    ni, nj = p.bits.shape
    rows = p.bits.T[::-1].astype(np.uint8)
    lines = ["P1", f"{ni} {nj}"]
    lines += [" ".join(map(str, r)) for r in rows.tolist()]
    pbm_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = {"epsilon": p.epsilon, "i_offset": p.spec.i_range[0], "j_offset": p.spec.j_range[0]}
    meta_path.write_text(json.dumps(meta), encoding="utf-8")


def read_pbm(pbm_path, meta_path=None) -> Pixelation:
    pbm_path = Path(pbm_path)
    meta_path = Path(meta_path) if meta_path else pbm_path.with_suffix(".json")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        eps = float(meta["epsilon"])
        i0, j0 = int(meta["i_offset"]), int(meta["j_offset"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CorruptInput(f"bad sidecar {meta_path}: {exc}") from exc
    tokens = []
    for line in pbm_path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P1":
        raise CorruptInput(f"{pbm_path} is not a plain PBM")
    try:
        ni, nj = int(tokens[1]), int(tokens[2])
        # P1 allows pixels to run together without whitespace
        data = "".join(tokens[3:])
        vals = np.frombuffer(data.encode("ascii"), dtype=np.uint8) - ord("0")
    except (IndexError, ValueError) as exc:
        raise CorruptInput(f"bad PBM header in {pbm_path}") from exc
    if vals.size != ni * nj or np.any(vals > 1):
        raise CorruptInput(f"{pbm_path}: expected {ni * nj} bits")
    bits = vals.reshape(nj, ni)[::-1].T.astype(bool)
    spec = GridSpec(eps, (i0, i0 + ni - 1), (j0, j0 + nj - 1))
    return Pixelation(spec, bits)
