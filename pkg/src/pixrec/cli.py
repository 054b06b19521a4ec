"""Command line interface: ``pixrec {pixelate,approximate,measure,converge,jumpscan,corpus}``.

Exit codes: 0 ok, 1 other error, 2 unknown shape, 3 resolution too coarse,
4 corrupt input.  Outputs go to ``--out``, else ``$PIXREC_OUT``, else
``./pixrec_out``.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import CorruptInput, ResolutionTooCoarse, UnknownShape
from .grid import Pixelation, rasterize, read_pbm, write_pbm
from .harness import RunConfig, converge, jumpscan, jumpscan_to_csv, output_dir
from .measures import measure, report_to_csv
from .recover import ApproxConfig, Polytrapezoid, default_schedule, reconstruct, to_svg
from .shapes import corpus_manifest, get_shape

log = logging.getLogger("pixrec")

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN_SHAPE, EXIT_COARSE, EXIT_CORRUPT = 0, 1, 2, 3, 4


def _eps(text: str) -> float:
    """Accept plain floats and powers of two written as ``2^-6``."""
    t = text.strip()
    if t.startswith("2^"):
        return 2.0 ** float(t[2:])
    return float(t)


def _out(args) -> Path:
    d = Path(args.out) if args.out else output_dir()
    d.mkdir(parents=True, exist_ok=True)
    return d


def _check_eps(eps: float) -> None:
    if not 0 < eps < 1:
        raise ResolutionTooCoarse(f"resolution must lie in (0, 1), got {eps}")


def cmd_pixelate(args) -> int:
    _check_eps(args.eps)
    shape = get_shape(args.shape)
    p = rasterize(shape, args.eps, supersample=args.supersample)
    out = _out(args)
    stem = f"{shape.name}_eps{args.eps:g}"
    write_pbm(p, out / f"{stem}.pbm", out / f"{stem}.json")
    print(out / f"{stem}.pbm")
    return EXIT_OK


def _load_pixelation(args) -> tuple[str, Pixelation]:
    if args.input:
        meta = args.meta or str(Path(args.input).with_suffix("")) + ".json"
        return Path(args.input).stem, read_pbm(args.input, meta)
    if not args.shape or args.eps is None:
        raise ValueError("approximate needs --in PBM or --shape NAME --eps E")
    _check_eps(args.eps)
    shape = get_shape(args.shape)
    return f"{shape.name}_eps{args.eps:g}", rasterize(shape, args.eps, supersample=args.supersample)


def cmd_approximate(args) -> int:
    name, p = _load_pixelation(args)
    out = _out(args)
    if len(p) == 0:
        (out / f"{name}.poly.json").write_text(Polytrapezoid().to_json(), encoding="utf-8")
        print(out / f"{name}.poly.json")
        return EXIT_OK
    _check_eps(p.epsilon)
    base = default_schedule(p.epsilon, args.kappa0)
    cfg = ApproxConfig(args.sigma or base.sigma, args.nu or base.nu, args.kappa0)
    rec = reconstruct(p, cfg)
    (out / f"{name}.poly.json").write_text(rec.polytrapezoid.to_json(), encoding="utf-8")
    (out / f"{name}.svg").write_text(to_svg(rec), encoding="utf-8")
    print(out / f"{name}.poly.json")
    return EXIT_OK


def cmd_measure(args) -> int:
    try:
        P = Polytrapezoid.from_json(Path(args.input).read_text(encoding="utf-8"))
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptInput(f"cannot read polytrapezoid {args.input}: {exc}") from exc
    sys.stdout.write(report_to_csv([measure(P, Path(args.input).name.split(".poly")[0])]))
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = RunConfig(args.shape, args.eps_list, args.kappa0, args.sigma, args.nu,
                    args.out, args.seed, args.supersample, args.half_planes)
    get_shape(args.shape)
    table = converge(cfg, workers=args.workers)
    out = _out(args)
    path = out / f"{table.shape}_converge.csv"
    path.write_text(table.to_csv(), encoding="utf-8")
    sys.stdout.write(table.to_csv())
    return EXIT_OK


def cmd_jumpscan(args) -> int:
    for e in args.eps_list:
        _check_eps(e)
    shape = get_shape(args.shape)
    eps = sorted(set(args.eps_list), reverse=True)
    text = jumpscan_to_csv(jumpscan(shape, eps, args.kappa0), args.kappa0)
    out = _out(args)
    (out / f"{shape.name}_jumpscan.csv").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_corpus(args) -> int:
    text = corpus_manifest()
    path = _out(args) / "corpus.json"
    path.write_text(text + "\n", encoding="utf-8")
    print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pixrec", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (default $PIXREC_OUT or ./pixrec_out)")

    p = sub.add_parser("pixelate", help="rasterize a corpus shape to PBM + JSON sidecar")
    p.add_argument("--shape", required=True)
    p.add_argument("--eps", type=_eps, required=True)
    p.add_argument("--supersample", type=int)
    common(p)
    p.set_defaults(func=cmd_pixelate)

    p = sub.add_parser("approximate", help="reconstruct S_eps as polytrapezoid JSON + SVG")
    p.add_argument("--in", dest="input")
    p.add_argument("--meta")
    p.add_argument("--shape")
    p.add_argument("--eps", type=_eps)
    p.add_argument("--sigma", type=int)
    p.add_argument("--nu", type=int)
    p.add_argument("--kappa0", type=float, default=0.5)
    p.add_argument("--supersample", type=int)
    common(p)
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("measure", help="length, curvature and Betti numbers of a polytrapezoid JSON")
    p.add_argument("--in", dest="input", required=True)
    common(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("converge", help="convergence table over a resolution sweep")
    p.add_argument("--shape", required=True)
    p.add_argument("--eps-list", type=_eps, nargs="+", default=[2.0 ** -k for k in range(4, 10)])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kappa0", type=float, default=0.5)
    p.add_argument("--sigma", type=int)
    p.add_argument("--nu", type=int)
    p.add_argument("--supersample", type=int)
    p.add_argument("--half-planes", type=int, default=50)
    p.add_argument("--workers", type=int, default=1, help="rows computed in parallel processes")
    common(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("jumpscan", help="distance between analytic and discrete jump sets")
    p.add_argument("--shape", required=True)
    p.add_argument("--eps-list", type=_eps, nargs="+", default=[2.0 ** -k for k in range(4, 10)])
    p.add_argument("--kappa0", type=float, default=0.5)
    common(p)
    p.set_defaults(func=cmd_jumpscan)

    p = sub.add_parser("corpus", help="write the corpus manifest with ground truths as JSON")
    common(p)
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UnknownShape as exc:
        log.error("unknown shape: %s", exc)
        return EXIT_UNKNOWN_SHAPE
    except ResolutionTooCoarse as exc:
        log.error("%s", exc)
        return EXIT_COARSE
    except CorruptInput as exc:
        log.error("%s", exc)
        return EXIT_CORRUPT
    except (OSError, ValueError, RuntimeError, MemoryError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
