"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 I/O error.
``HYPERLENS_THREADS`` caps the worker threads used by ``sweep``.
"""
from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .errors import DomainError, GridTooLarge, HyperlensError, ParseError
from .grid import ImageGrid
from .imageio import quantize, read_image, write_image
from .metrics import csv_row, csv_text, evaluate
from .pipeline import (
    DEFAULT_DECIMATION, DEFAULT_EPSILON, SAMPLING_MODES, CaptureConfig, ReconstructConfig,
    baseline_stages, check_recovered_shape, diffract, hyperacuity_stages, reconstruct, sense,
)
from .psf import DEFAULT_RADIUS, PSF_KINDS, PsfSpec, make_psf, rayleigh_pitch
from .radiometry import (
    SensorSpec, area_ratio, circle_area, dynamic_range, fovea_cone_estimate, parse_quantity,
    photon_count,
)
from .scenes import CORPUS, generate, parse_scene_spec

log = logging.getLogger("hyperlens")

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3
MAX_SWEEP_RUNS = 10_000
PIPELINES = ("hyperacuity", "baseline")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------- helpers

def _add_psf_flags(p):
    p.add_argument("--psf", choices=PSF_KINDS, default="airy", help="PSF kind (default: airy)")
    p.add_argument("--psf-radius", type=float, default=DEFAULT_RADIUS,
                   help="airy first-zero radius or gaussian sigma, high-res pixels (default: 35)")
    p.add_argument("--psf-support", type=int, default=None,
                   help="kernel half-width in pixels (default: 2*radius airy, 8*radius gaussian)")


def _add_capture_flags(p):
    _add_psf_flags(p)
    p.add_argument("--decimation", "-D", type=int, default=DEFAULT_DECIMATION, help="sensor pitch D (default: 10)")
    p.add_argument("--sampling", choices=SAMPLING_MODES, default="point", help="sensor model (default: point)")
    p.add_argument("--noise-sigma", type=float, default=0.0, help="std of additive sensor noise (default: 0)")
    p.add_argument("--seed", type=int, default=0, help="noise seed (default: 0)")


def _add_reconstruct_flags(p):
    p.add_argument("--upsample", "-U", type=int, default=None, help="interpolation factor U (default: D)")
    p.add_argument("--eps", type=float, default=DEFAULT_EPSILON,
                   help="inverse-filter threshold relative to max|H| (default: 1e-3)")
    p.add_argument("--unsafe-inverse", action="store_true", help="allow --eps 0 (unguarded 1/H)")


def _add_bits(p):
    p.add_argument("--bits", type=int, choices=(8, 16), default=8, help="PGM/PPM bit depth (default: 8)")


def _psf_from(args) -> PsfSpec:
    return PsfSpec(args.psf, args.psf_radius, args.psf_support)


def _capture_from(args) -> CaptureConfig:
    return CaptureConfig(
        psf=_psf_from(args), decimation=args.decimation, sampling_mode=args.sampling,
        noise_sigma=args.noise_sigma, seed=args.seed,
    )


def _reconstruct_from(args) -> ReconstructConfig:
    return ReconstructConfig(upsample=args.upsample, inverse_epsilon=args.eps, unsafe=args.unsafe_inverse)


def _config_dict(cc: CaptureConfig | None = None, rc: ReconstructConfig | None = None, **extra):
    out = {}
    if cc is not None:
        out["capture"] = asdict(cc)
        out["capture"]["psf"]["half_width"] = cc.psf.half_width
    if rc is not None:
        out["reconstruct"] = asdict(rc)
        if cc is not None:
            out["reconstruct"]["upsample"] = rc.resolved_upsample(cc)
    out.update(extra)
    return out


def _write_manifest(path: Path, argv, config, timings, outputs) -> Path:
    manifest = {
        "command": ["hyperlens", *argv],
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "config": config,
        "timings_ms": {k: round(v, 3) for k, v in timings.items()},
        "outputs": [str(o) for o in outputs],
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _sidecar(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def _image_suffix(fmt: str, channels: int) -> str:
    if fmt == "pfm":
        return ".pfm"
    return ".pgm" if channels == 1 else ".ppm"


# ---------------------------------------------------------------- commands

def cmd_scene(args, argv):
    t0 = time.perf_counter()
    spec = parse_scene_spec(args.spec)
    img = generate(spec)
    t1 = time.perf_counter()
    out = write_image(args.out, img, args.bits)
    if not args.no_manifest:
        _write_manifest(_sidecar(out), argv, {"scene": args.spec, "bits": args.bits},
                        {"generate": (t1 - t0) * 1e3}, [out])
    return EXIT_OK


def cmd_psf(args, argv):
    spec = _psf_from(args)
    size = args.size or 2 * spec.half_width + 1
    k = make_psf(spec, size, size).samples
    # centre the kernel and scale the peak to 1 for viewing
    view = np.fft.fftshift(k, axes=(-2, -1))
    img = ImageGrid(view / view.max())
    out = write_image(args.out, img, args.bits)
    if not args.no_manifest:
        _write_manifest(_sidecar(out), argv, {"psf": asdict(spec), "size": size}, {}, [out])
    if spec.kind == "airy":
        print(f"rayleigh_pitch={rayleigh_pitch(spec)!r}")
    return EXIT_OK


def cmd_capture(args, argv):
    cc = _capture_from(args)
    img = read_image(args.input)
    t0 = time.perf_counter()
    blurred = diffract(img, cc.psf)
    t1 = time.perf_counter()
    captured = sense(blurred, cc)
    t2 = time.perf_counter()
    out = write_image(args.out, captured, args.bits)
    if not args.no_manifest:
        _write_manifest(_sidecar(out), argv, _config_dict(cc, input=str(args.input), bits=args.bits),
                        {"diffract": (t1 - t0) * 1e3, "sense": (t2 - t1) * 1e3}, [out])
    return EXIT_OK


def cmd_reconstruct(args, argv):
    cc = CaptureConfig(psf=_psf_from(args), decimation=args.decimation, sampling_mode=args.sampling)
    rc = _reconstruct_from(args)
    captured = read_image(args.input)
    result = reconstruct(captured, cc, rc, stop_after_interpolation=args.stop_after_interpolation)
    out = write_image(args.out, result.output, args.bits)
    if not args.no_manifest:
        cfg = _config_dict(cc, rc, input=str(args.input), bits=args.bits,
                           stop_after_interpolation=args.stop_after_interpolation)
        _write_manifest(_sidecar(out), argv, cfg, result.timings_ms, [out])
    return EXIT_OK


@lru_cache(maxsize=16)
def _scene(text: str):
    return generate(parse_scene_spec(text))


def _run_pair(scene_text, pipeline, cc: CaptureConfig, rc: ReconstructConfig, peak: float):
    scene = _scene(scene_text)
    if pipeline == "hyperacuity":
        result = hyperacuity_stages(scene, cc, rc)
    else:
        result = baseline_stages(scene, cc, rc.resolved_upsample(cc))
    check_recovered_shape(scene, result.output)
    reference, estimate = scene, result.output
    if peak != 1.0:
        # compare the quantized exports at this peak
        reference = ImageGrid(quantize(scene.samples, int(peak)).astype(float))
        estimate = ImageGrid(quantize(result.output.samples, int(peak)).astype(float))
    report = evaluate(reference, estimate, peak=peak)
    row = csv_row(
        scene_text, pipeline, cc.decimation, rc.resolved_upsample(cc), cc.psf.kind, float(cc.psf.radius),
        float(rc.inverse_epsilon), float(cc.noise_sigma), cc.seed, report,
    )
    return row, result


def cmd_compare(args, argv):
    cc = _capture_from(args)
    rc = _reconstruct_from(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scene_text = args.scene
    rows, outputs, timings = [], [], {}
    scene = _scene(scene_text)
    outputs.append(write_image(out_dir / f"scene{_image_suffix(args.format, scene.channels)}", scene, args.bits))
    for pipeline in PIPELINES:
        row, result = _run_pair(scene_text, pipeline, cc, rc, args.peak)
        rows.append(row)
        for name, ms in result.timings_ms.items():
            timings[f"{pipeline}.{name}"] = ms
        suffix = _image_suffix(args.format, result.output.channels)
        outputs.append(write_image(out_dir / f"{pipeline}_captured{suffix}", result.images["captured"], args.bits))
        outputs.append(write_image(out_dir / f"{pipeline}{suffix}", result.output, args.bits))
    csv_path = out_dir / "compare.csv"
    csv_path.write_text(csv_text(rows))
    outputs.append(csv_path)
    if not args.no_manifest:
        cfg = _config_dict(cc, rc, scene=scene_text, peak=args.peak, format=args.format, bits=args.bits)
        _write_manifest(out_dir / "manifest.json", argv, cfg, timings, outputs)
    for row in rows:
        print(f"{row['pipeline']}: psnr_pooled={row['psnr_pooled']} dB")
    return EXIT_OK


def _split(text: str, cast):
    if text.strip() == "":
        return []
    try:
        return [cast(t) for t in text.split(",")]
    except ValueError:
        raise ParseError(f"cannot parse list {text!r}", token=text) from None


def _threads() -> int:
    raw = os.environ.get("HYPERLENS_THREADS", "")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ParseError(f"HYPERLENS_THREADS must be an integer, got {raw!r}", token=raw) from None
    return os.cpu_count() or 1


def sweep_grid(args):
    """Cartesian product in CSV column order; values keep the order given."""
    scenes = args.scene if args.scene is not None else list(CORPUS)
    axes = [
        scenes,
        _split(args.pipeline, str),
        _split(args.decimation, int),
        _split(args.upsample, int) if args.upsample is not None else [None],
        _split(args.psf, str),
        _split(args.psf_radius, float),
        _split(args.eps, float),
        _split(args.noise_sigma, float),
        _split(args.seed, int),
    ]
    for p in axes[1]:
        if p not in PIPELINES:
            raise ParseError(f"unknown pipeline {p!r}", token=p)
    total = 1
    for a in axes:
        total *= len(a)
    if total > MAX_SWEEP_RUNS:
        raise GridTooLarge(f"sweep grid has {total} runs; the limit is {MAX_SWEEP_RUNS}")
    return list(itertools.product(*axes))


def cmd_sweep(args, argv):
    grid = sweep_grid(args)

    def one(cell):
        scene_text, pipeline, d, u, kind, radius, eps, sigma, seed = cell
        cc = CaptureConfig(PsfSpec(kind, radius, args.psf_support), d, args.sampling, sigma, seed)
        rc = ReconstructConfig(u, eps, args.unsafe_inverse)
        return _run_pair(scene_text, pipeline, cc, rc, args.peak)[0]

    t0 = time.perf_counter()
    workers = min(_threads(), max(1, len(grid)))
    if workers == 1:
        rows = [one(c) for c in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, grid))  # map preserves grid order
    out = Path(args.out)
    out.write_text(csv_text(rows))
    if not args.no_manifest:
        cfg = {"grid_size": len(grid), "sampling": args.sampling, "psf_support": args.psf_support,
               "peak": args.peak, "workers": workers}
        _write_manifest(_sidecar(out), argv, cfg, {"sweep": (time.perf_counter() - t0) * 1e3}, [out])
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def cmd_radiometry(args, argv):
    area = parse_quantity(args.area)
    spec = SensorSpec(
        area=area, irradiance=parse_quantity(args.irradiance), exposure=parse_quantity(args.exposure),
        wavelength=parse_quantity(args.wavelength), sat_irradiation=parse_quantity(args.sat),
        min_irradiation=parse_quantity(args.min),
    )
    if args.cone_area is not None:
        cone = parse_quantity(args.cone_area)
    else:
        cone = circle_area(parse_quantity(args.cone_diameter))
    pixel = parse_quantity(args.pixel_area)
    dr = dynamic_range(spec)
    report = [
        ("photons", photon_count(spec)),
        ("dr_ratio", dr.ratio),
        ("dr_db", dr.db),
        ("area_ratio", area_ratio(cone, pixel)),
        ("cone_estimate", fovea_cone_estimate(float(args.density), float(args.fovea_diameter))),
    ]
    for key, value in report:
        print(f"{key}={value!r}")
    print("# dr_db = 20*log10(dr_ratio)")
    print(f"# area_ratio = pixel area {pixel * 1e12:.4g} um2 / cone area {cone * 1e12:.4g} um2")
    print(f"# cone_estimate = {args.density} per mm2 over a {args.fovea_diameter} mm disc")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyperlens", description="Diffraction-enhanced sub-Nyquist imaging simulator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("scene", help="render a synthetic scene")
    s.add_argument("spec", help="scene string, e.g. grid_lines,h=500,w=500,pitch=50,width=1")
    s.add_argument("out", help="output image (.pgm/.ppm/.pfm)")
    _add_bits(s)
    s.set_defaults(func=cmd_scene)

    s = sub.add_parser("psf", help="export the PSF as a centred, peak-normalized image")
    s.add_argument("out")
    _add_psf_flags(s)
    s.add_argument("--size", type=int, default=None, help="image side (default: 2*support+1)")
    _add_bits(s)
    s.set_defaults(func=cmd_psf)

    s = sub.add_parser("capture", help="diffract and sense an image")
    s.add_argument("input")
    s.add_argument("out")
    _add_capture_flags(s)
    _add_bits(s)
    s.set_defaults(func=cmd_capture)

    s = sub.add_parser("reconstruct", help="interpolate and inverse-filter a captured image")
    s.add_argument("input")
    s.add_argument("out")
    _add_psf_flags(s)
    s.add_argument("--decimation", "-D", type=int, default=DEFAULT_DECIMATION,
                   help="capture pitch D, used to place the PSF on the recovered grid (default: 10)")
    s.add_argument("--sampling", choices=SAMPLING_MODES, default="point",
                   help="capture model; area also inverts the block mean (default: point)")
    _add_reconstruct_flags(s)
    s.add_argument("--stop-after-interpolation", action="store_true")
    _add_bits(s)
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("compare", help="run both pipelines on one scene; write images and CSV")
    s.add_argument("scene", nargs="?", default=CORPUS[0], help=f"scene string (default: {CORPUS[0]})")
    s.add_argument("--out-dir", required=True)
    _add_capture_flags(s)
    _add_reconstruct_flags(s)
    s.add_argument("--peak", type=float, default=1.0, help="PSNR peak; 255 compares 8-bit exports")
    s.add_argument("--format", choices=("pnm", "pfm"), default="pnm")
    _add_bits(s)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("sweep", help="CSV over a cartesian grid of settings (comma-separated lists)")
    s.add_argument("--out", required=True, help="output CSV")
    s.add_argument("--scene", action="append", default=None, help="scene string; repeatable (default: corpus)")
    s.add_argument("--pipeline", default="hyperacuity", help="hyperacuity,baseline")
    s.add_argument("--decimation", default=str(DEFAULT_DECIMATION))
    s.add_argument("--upsample", default=None, help="default: equal to decimation")
    s.add_argument("--psf", default="airy")
    s.add_argument("--psf-radius", default=repr(DEFAULT_RADIUS))
    s.add_argument("--psf-support", type=int, default=None)
    s.add_argument("--eps", default=repr(DEFAULT_EPSILON))
    s.add_argument("--noise-sigma", default="0.0")
    s.add_argument("--seed", default="0")
    s.add_argument("--sampling", choices=SAMPLING_MODES, default="point")
    s.add_argument("--unsafe-inverse", action="store_true")
    s.add_argument("--peak", type=float, default=1.0)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("radiometry", help="photon count, dynamic range and cone geometry")
    s.add_argument("--area", default="1um2", help="pixel area (default: 1um2)")
    s.add_argument("--irradiance", default="1", help="W/m2 (default: 1)")
    s.add_argument("--exposure", default="1ms")
    s.add_argument("--wavelength", default="550nm")
    s.add_argument("--sat", default="1e8", help="saturation irradiation (default: 1e8)")
    s.add_argument("--min", default="1", help="minimum detectable irradiation (default: 1)")
    s.add_argument("--cone-diameter", default="1.5um")
    s.add_argument("--cone-area", default=None, help="overrides --cone-diameter")
    s.add_argument("--pixel-area", default="4.84um2")
    s.add_argument("--density", default="147000", help="cones per mm2")
    s.add_argument("--fovea-diameter", default="1.5", help="mm")
    s.set_defaults(func=cmd_radiometry)

    for sp in sub.choices.values():
        sp.add_argument("--no-manifest", action="store_true", help="skip the JSON run manifest")
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return args.func(args, argv)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except HyperlensError as exc:  # pragma: no cover - every subclass is mapped above
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
