import csv
import json
import math

import numpy as np
import pytest

from hyperlens.cli import EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_USAGE, MAX_SWEEP_RUNS, main
from hyperlens.imageio import read_image

SMALL = "grid_lines,h=200,w=200,pitch=20,width=2,offset=7"


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_scene_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    assert main(["scene", SMALL, str(a)]) == EXIT_OK
    assert main(["scene", SMALL, str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    manifest = json.loads((tmp_path / "a.pgm.manifest.json").read_text())
    assert manifest["config"]["scene"] == SMALL


def test_scene_pfm_and_no_manifest(tmp_path):
    out = tmp_path / "a.pfm"
    assert main(["scene", "edges,h=64,w=64", str(out), "--no-manifest"]) == EXIT_OK
    assert read_image(out).channels == 3
    assert not (tmp_path / "a.pfm.manifest.json").exists()


@pytest.mark.parametrize("spec", ["grid_lines,h=500,pitch", "triangles", "circle,radius=x"])
def test_scene_malformed_is_usage_error(tmp_path, spec, capsys):
    assert main(["scene", spec, str(tmp_path / "a.pgm")]) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_scene_invalid_params_is_domain_error(tmp_path):
    assert main(["scene", "grid_lines,h=64,w=64,pitch=2,width=3", str(tmp_path / "a.pgm")]) == EXIT_DOMAIN


def test_unknown_subcommand_and_missing_file(tmp_path):
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["capture", str(tmp_path / "missing.pgm"), str(tmp_path / "o.pgm")]) == EXIT_IO


def test_capture_shapes(tmp_path):
    scene = tmp_path / "s.pfm"
    main(["scene", "bandlimited_noise,h=1500,w=2000,bandlimit=0.1", str(scene), "--no-manifest"])
    out = tmp_path / "c.pfm"
    assert main(["capture", str(scene), str(out), "-D", "10", "--no-manifest"]) == EXIT_OK
    img = read_image(out)
    assert (img.height, img.width) == (150, 200)


def test_capture_delta_identity(tmp_path):
    scene = tmp_path / "s.pgm"
    main(["scene", SMALL, str(scene), "--no-manifest"])
    out = tmp_path / "c.pgm"
    assert main(["capture", str(scene), str(out), "-D", "1", "--psf", "delta", "--no-manifest"]) == EXIT_OK
    assert out.read_bytes() == scene.read_bytes()


def test_capture_not_divisible(tmp_path, capsys):
    scene = tmp_path / "s.pgm"
    main(["scene", "edges,h=205,w=200,color=0", str(scene), "--no-manifest"])
    assert main(["capture", str(scene), str(tmp_path / "c.pgm"), "-D", "10"]) == EXIT_DOMAIN
    assert "NotDivisible" in capsys.readouterr().err


def test_psf_export(tmp_path, capsys):
    out = tmp_path / "p.pgm"
    assert main(["psf", str(out), "--psf-radius", "5"]) == EXIT_OK
    img = read_image(out).samples[0]
    assert img.shape == (21, 21) and img[10, 10] == 1.0
    assert "rayleigh_pitch=5.0" in capsys.readouterr().out


def test_reconstruct_modes(tmp_path):
    scene = tmp_path / "s.pfm"
    main(["scene", "edges,h=200,w=200,color=0", str(scene), "--no-manifest"])
    cap = tmp_path / "c.pfm"
    main(["capture", str(scene), str(cap), "--psf-radius", "10", "--no-manifest"])
    interp = tmp_path / "i.pfm"
    assert main(["reconstruct", str(cap), str(interp), "--psf-radius", "10", "--stop-after-interpolation"]) == EXIT_OK
    rec = tmp_path / "r.pfm"
    assert main(["reconstruct", str(cap), str(rec), "--psf-radius", "10"]) == EXIT_OK
    a, b = read_image(interp), read_image(rec)
    assert a.shape == b.shape == (1, 200, 200)
    assert not np.array_equal(a.samples, b.samples)
    timings = json.loads((tmp_path / "r.pfm.manifest.json").read_text())["timings_ms"]
    assert set(timings) == {"interpolate", "inverse_filter"}


def test_reconstruct_eps_one_keeps_only_dc(tmp_path):
    scene = tmp_path / "s.pfm"
    main(["scene", "edges,h=100,w=100,color=0", str(scene), "--no-manifest"])
    cap = tmp_path / "c.pfm"
    main(["capture", str(scene), str(cap), "--psf-radius", "10", "--no-manifest"])
    rec = tmp_path / "r.pfm"
    assert main(["reconstruct", str(cap), str(rec), "--psf-radius", "10", "--eps", "1", "--no-manifest"]) == EXIT_OK
    out = read_image(rec).samples
    assert np.ptp(out) < 1e-6


@pytest.mark.parametrize("eps", ["0", "-1e-3", "1.5", "nan"])
def test_reconstruct_bad_eps(tmp_path, eps):
    scene = tmp_path / "s.pfm"
    main(["scene", "edges,h=100,w=100,color=0", str(scene), "--no-manifest"])
    assert main(["reconstruct", str(scene), str(tmp_path / "r.pfm"), f"--eps={eps}"]) == EXIT_DOMAIN


def test_compare_outputs(tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", SMALL, "--out-dir", str(out), "--psf-radius", "14", "-D", "5"]) == EXIT_OK
    got = rows(out / "compare.csv")
    assert [r["pipeline"] for r in got] == ["hyperacuity", "baseline"]
    by = {r["pipeline"]: float(r["psnr_pooled"]) for r in got}
    assert by["hyperacuity"] > by["baseline"]
    for name in ("scene.pgm", "baseline.pgm", "hyperacuity.pgm", "baseline_captured.pgm",
                 "hyperacuity_captured.pgm", "manifest.json"):
        assert (out / name).exists()


def test_compare_delta_identity_is_infinite(tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", SMALL, "--out-dir", str(out), "--psf", "delta", "-D", "1"]) == EXIT_OK
    for r in rows(out / "compare.csv"):
        assert r["psnr_pooled"] == "inf" and math.isinf(float(r["psnr_pooled"]))
        assert r["mse_pooled"] == "0.0"


def test_compare_heavy_noise_still_finite(tmp_path):
    out = tmp_path / "cmp"
    code = main(["compare", SMALL, "--out-dir", str(out), "--noise-sigma", "0.2", "--psf-radius", "14",
                 "-D", "5", "--format", "pfm", "--no-manifest"])
    assert code == EXIT_OK
    for r in rows(out / "compare.csv"):
        assert math.isfinite(float(r["psnr_pooled"]))
    assert np.isfinite(read_image(out / "hyperacuity.pfm").samples).all()


def test_compare_upsample_mismatch_is_domain_error(tmp_path):
    assert main(["compare", SMALL, "--out-dir", str(tmp_path), "-D", "5", "-U", "2"]) == EXIT_DOMAIN


def test_sweep_grid_and_order(tmp_path):
    out = tmp_path / "s.csv"
    code = main(["sweep", "--out", str(out), "--scene", SMALL, "--pipeline", "hyperacuity,baseline",
                 "--decimation", "5,10", "--psf-radius", "14"])
    assert code == EXIT_OK
    got = rows(out)
    assert len(got) == 4
    assert [(r["pipeline"], r["D"]) for r in got] == [
        ("hyperacuity", "5"), ("hyperacuity", "10"), ("baseline", "5"), ("baseline", "10")]
    assert [r["U"] for r in got] == ["5", "10", "5", "10"]


def test_sweep_is_byte_identical_across_thread_counts(tmp_path, monkeypatch):
    args = ["--scene", SMALL, "--eps", "1e-3,1e-2", "--noise-sigma", "0.01", "--seed", "1,2",
            "--psf-radius", "14", "--decimation", "5", "--no-manifest"]
    monkeypatch.setenv("HYPERLENS_THREADS", "1")
    main(["sweep", "--out", str(tmp_path / "a.csv"), *args])
    monkeypatch.setenv("HYPERLENS_THREADS", "4")
    main(["sweep", "--out", str(tmp_path / "b.csv"), *args])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert len(rows(tmp_path / "a.csv")) == 4


def test_sweep_empty_axis_gives_header_only(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--out", str(out), "--scene", SMALL, "--eps", ""]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("scene,pipeline,D,U,")


def test_sweep_too_large(tmp_path, capsys):
    seeds = ",".join(str(i) for i in range(MAX_SWEEP_RUNS // 5 + 1))
    assert main(["sweep", "--out", str(tmp_path / "s.csv"), "--seed", seeds]) == EXIT_DOMAIN
    assert "GridTooLarge" in capsys.readouterr().err


def test_sweep_bad_list_is_usage_error(tmp_path):
    assert main(["sweep", "--out", str(tmp_path / "s.csv"), "--decimation", "5,x"]) == EXIT_USAGE


def test_radiometry_report(capsys):
    assert main(["radiometry"]) == EXIT_OK
    lines = [ln for ln in capsys.readouterr().out.splitlines() if not ln.startswith("#")]
    report = dict(ln.split("=", 1) for ln in lines)
    assert list(report) == ["photons", "dr_ratio", "dr_db", "area_ratio", "cone_estimate"]
    assert float(report["photons"]) == pytest.approx(2768.761876603785, rel=1e-14)
    assert float(report["dr_db"]) == 160.0
    assert float(report["area_ratio"]) == pytest.approx(2.74, abs=0.01)
    assert float(report["cone_estimate"]) == pytest.approx(259770.44, abs=0.01)


def test_radiometry_bad_input():
    assert main(["radiometry", "--area", "-1um2"]) in (EXIT_USAGE, EXIT_DOMAIN)
    assert main(["radiometry", "--area", "1 furlong"]) == EXIT_USAGE
    assert main(["radiometry", "--area", "0um2"]) == EXIT_DOMAIN
