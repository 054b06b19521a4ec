import csv
import io
import json
import math
import os
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from pixrec.cli import main
from pixrec.errors import ResolutionTooCoarse
from pixrec.grid import GridSpec, Pixelation, rasterize, read_pbm, write_pbm
from pixrec.harness import (
    RunConfig,
    converge,
    half_plane_check,
    jumpscan,
    jumpscan_to_csv,
    output_dir,
    random_half_planes,
    run_one,
    schedule_for,
)
from pixrec.recover import ApproxConfig, Polytrapezoid, default_schedule, reconstruct, to_svg
from pixrec.shapes import Elementary, GroundTruth, get_shape

SVG = "{http://www.w3.org/2000/svg}"

CONVERGE_HEADER = ("shape,epsilon,sigma,nu,length,curvature,chi,b0,b1,hausdorff,mass,"
                   "rel_err_length,rel_err_curvature,rel_err_chi,half_plane_agreement")


# ---------------------------------------------------------------------------
# CLI


def test_pixelate_round_trip(tmp_path, capsys):
    assert main(["pixelate", "--shape", "disk", "--eps", "2^-4", "--out", str(tmp_path)]) == 0
    pbm = tmp_path / "disk_eps0.0625.pbm"
    assert capsys.readouterr().out.strip() == str(pbm)
    assert read_pbm(pbm) == rasterize(get_shape("disk"), 2.0 ** -4)
    meta = json.loads((tmp_path / "disk_eps0.0625.json").read_text(encoding="utf-8"))
    assert meta["epsilon"] == 0.0625


@pytest.mark.parametrize(
    "argv, code",
    [
        (["pixelate", "--shape", "dodecahedron", "--eps", "0.1"], 2),
        (["pixelate", "--shape", "disk", "--eps", "1"], 3),
        (["pixelate", "--shape", "disk", "--eps", "1.5"], 3),
        (["approximate", "--shape", "nope", "--eps", "0.1"], 2),
        (["approximate"], 1),
        (["converge", "--shape", "disk", "--eps-list", "0.5", "2"], 3),
        (["jumpscan", "--shape", "nope"], 2),
    ],
)
def test_exit_codes(tmp_path, argv, code):
    assert main(argv + ["--out", str(tmp_path)]) == code


def test_corrupt_sidecar_exits_4(tmp_path):
    p = rasterize(get_shape("disk"), 0.25)
    write_pbm(p, tmp_path / "d.pbm")
    (tmp_path / "d.json").write_text('{"epsilon": "x"', encoding="utf-8")
    assert main(["approximate", "--in", str(tmp_path / "d.pbm"), "--out", str(tmp_path)]) == 4
    (tmp_path / "bad.poly.json").write_text("[1, 2", encoding="utf-8")
    assert main(["measure", "--in", str(tmp_path / "bad.poly.json")]) == 4


def test_empty_pbm_gives_empty_json(tmp_path):
    p = Pixelation(GridSpec(0.125, (0, 3), (0, 3)), np.zeros((4, 4), dtype=bool))
    write_pbm(p, tmp_path / "e.pbm")
    assert main(["approximate", "--in", str(tmp_path / "e.pbm"), "--out", str(tmp_path)]) == 0
    P = Polytrapezoid.from_json((tmp_path / "e.poly.json").read_text(encoding="utf-8"))
    assert P.is_empty


def test_approximate_then_measure(tmp_path, capsys):
    assert main(["pixelate", "--shape", "annulus", "--eps", "2^-6", "--out", str(tmp_path)]) == 0
    pbm = tmp_path / "annulus_eps0.015625.pbm"
    assert main(["approximate", "--in", str(pbm), "--out", str(tmp_path)]) == 0
    poly = tmp_path / "annulus_eps0.015625.poly.json"
    assert (tmp_path / "annulus_eps0.015625.svg").exists()
    capsys.readouterr()
    assert main(["measure", "--in", str(poly)]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 1
    assert rows[0]["shape"] == "annulus_eps0.015625"
    assert (rows[0]["chi"], rows[0]["b0"], rows[0]["b1"]) == ("0", "1", "1")


def test_schedule_overrides_reach_the_reconstruction(tmp_path):
    assert main(["approximate", "--shape", "disk", "--eps", "2^-5", "--sigma", "3", "--nu", "5",
                 "--out", str(tmp_path)]) == 0
    P = Polytrapezoid.from_json((tmp_path / "disk_eps0.03125.poly.json").read_text(encoding="utf-8"))
    rec = reconstruct(rasterize(get_shape("disk"), 2.0 ** -5), ApproxConfig(3, 5))
    assert P == rec.polytrapezoid


def test_pixrec_out_env(tmp_path, monkeypatch):
    monkeypatch.setenv("PIXREC_OUT", str(tmp_path / "env"))
    assert output_dir() == tmp_path / "env"
    assert main(["pixelate", "--shape", "disk", "--eps", "0.25"]) == 0
    assert (tmp_path / "env" / "disk_eps0.25.pbm").exists()
    monkeypatch.delenv("PIXREC_OUT")
    assert str(output_dir()) == "pixrec_out"


def test_module_entry_point(tmp_path):
    env = dict(os.environ, PIXREC_OUT=str(tmp_path))
    res = subprocess.run([sys.executable, "-m", "pixrec", "pixelate", "--shape", "nope", "--eps", "0.1"],
                         env=env, capture_output=True, text=True)
    assert res.returncode == 2
    assert "unknown shape" in res.stderr


def test_corpus_command(tmp_path):
    assert main(["corpus", "--out", str(tmp_path)]) == 0
    entries = json.loads((tmp_path / "corpus.json").read_text(encoding="utf-8"))
    assert {"disk", "angle", "S2", "cusp"} <= {e["name"] for e in entries}


# ---------------------------------------------------------------------------
# golden formats


def test_converge_csv_golden_header(tmp_path):
    assert main(["converge", "--shape", "disk", "--eps-list", "2^-4", "2^-5", "--half-planes", "5",
                 "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "disk_converge.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == CONVERGE_HEADER
    assert lines[1].startswith("disk,truth,,,6.283185307179586,6.283185307179586,1,1,0,")
    assert [ln.split(",")[1] for ln in lines[2:]] == ["0.0625", "0.03125"]


def test_jumpscan_csv_golden_header():
    rows = jumpscan(get_shape("disk"), [2.0 ** -4, 2.0 ** -6])
    lines = jumpscan_to_csv(rows).splitlines()
    assert lines[0] == "epsilon,dist_H,dist_H/eps^0.5"
    assert len(lines) == 3


def test_svg_structure():
    eps = 2.0 ** -4
    rec = reconstruct(rasterize(get_shape("circle"), eps), default_schedule(eps))
    root = ET.fromstring(to_svg(rec).encode("utf-8"))
    assert root.tag == SVG + "svg"
    groups = {g.get("id"): g for g in root.findall(SVG + "g")}
    assert list(groups) == ["pixels", "approximation", "noise"]
    assert len(groups["pixels"]) == len(rec.pixelation)
    assert len(groups["approximation"]) == rec.polytrapezoid.n_pieces()
    # the circle example: one noise block at each end
    assert len(rec.partition.noise) == 2
    assert len(groups["noise"]) == len(rec.rectangles) >= 2


# ---------------------------------------------------------------------------
# sweeps


def test_run_config_validation():
    cfg = RunConfig("disk", [2.0 ** -6, 2.0 ** -4, 2.0 ** -5])
    assert cfg.eps_list == (2.0 ** -4, 2.0 ** -5, 2.0 ** -6)
    with pytest.raises(ResolutionTooCoarse):
        RunConfig("disk", [0.5, 1.0])
    with pytest.raises(ValueError):
        RunConfig("disk", [0.25, 0.25])
    assert schedule_for(RunConfig("disk", [0.25], sigma=5), 2.0 ** -6).sigma == 5
    assert schedule_for(RunConfig("disk", [0.25]), 2.0 ** -6) == default_schedule(2.0 ** -6)


def test_seeded_half_planes_are_deterministic():
    shape = get_shape("annulus")
    a = [hp for hp, _ in zip(random_half_planes(shape, seed=7), range(20))]
    b = [hp for hp, _ in zip(random_half_planes(shape, seed=7), range(20))]
    c = [hp for hp, _ in zip(random_half_planes(shape, seed=8), range(20))]
    assert a == b and a != c
    for (xi0, xi1), _ in a:
        # never within the vertical-line band
        assert abs(xi1) >= math.sin(1e-3)
    eps = 2.0 ** -6
    P, _ = run_one(shape, eps, default_schedule(eps), hausdorff=False)
    assert half_plane_check(shape, P, eps, 10, seed=3) == half_plane_check(shape, P, eps, 10, seed=3)


def test_converge_table_is_deterministic_and_consistent():
    cfg = RunConfig("annulus", [2.0 ** -4, 2.0 ** -6], n_half_planes=10, seed=1)
    t1, t2 = converge(cfg), converge(cfg)
    assert t1.to_csv() == t2.to_csv()
    assert len(t1.rows) == 2 and len(t1.half_plane_agreement) == 2
    assert t1.topology_ok() == [(r.b0, r.b1) == (1, 1) for r in t1.rows]
    truth = t1.truth
    for r, e in zip(t1.rows, t1.errors("length")):
        assert e == pytest.approx(abs(r.length - truth.length) / max(abs(truth.length), 1.0))
    assert t1.mass() == [r.length + r.curvature for r in t1.rows]


def test_converge_parallel_matches_serial():
    cfg = RunConfig("disk", [2.0 ** -4, 2.0 ** -5, 2.0 ** -6], n_half_planes=5)
    assert converge(cfg, workers=2).to_csv() == converge(cfg).to_csv()


def test_jumpscan_single_rectangle_sees_only_end_jumps():
    box = Elementary.box(-0.7, 0.6, -0.3, 0.45)
    box.truth = GroundTruth(1, 0, (-0.7, 0.6))
    rows = jumpscan(box, [2.0 ** -4, 2.0 ** -6, 2.0 ** -8])
    for r in rows:
        # closed pixels: the jump sits at most one and a half columns from the edge
        assert r.distance <= 1.5 * r.epsilon + 1e-12


def test_jumpscan_segment_pair_sees_origin_and_ends():
    rows = jumpscan(get_shape("S1"), [2.0 ** -6, 2.0 ** -8], nu0=0.4)
    assert all(r.covered for r in rows)
    assert rows[-1].distance < rows[0].distance
