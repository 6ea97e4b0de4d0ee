"""End-to-end capture and reconstruction.

Two chains are provided:

* hyperacuity: diffract -> sense -> interpolate_fft -> inverse_filter
* baseline (diffraction-limited): sense -> interpolate_fft

Everything is periodic; see :mod:`hyperlens.grid`.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, EpsilonOutOfRange, InvalidParams, NotDivisible
from .grid import ImageGrid, Spectrum, dft2, idft2, multiply_spectra, negated_index
from .psf import PsfSpec, make_otf, make_psf

SAMPLING_MODES = ("point", "area")
DEFAULT_DECIMATION = 10
DEFAULT_EPSILON = 1e-3
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class CaptureConfig:
    psf: PsfSpec = field(default_factory=PsfSpec)
    decimation: int = DEFAULT_DECIMATION
    sampling_mode: str = "point"
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.decimation) != self.decimation or self.decimation < 1:
            raise InvalidParams(f"decimation must be an integer >= 1, got {self.decimation}")
        if self.sampling_mode not in SAMPLING_MODES:
            raise InvalidParams(f"sampling_mode must be one of {SAMPLING_MODES}")
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            raise InvalidParams(f"noise_sigma must be >= 0, got {self.noise_sigma}")


@dataclass(frozen=True)
class ReconstructConfig:
    """``upsample=None`` means "same as the capture decimation"."""

    upsample: int | None = None
    inverse_epsilon: float = DEFAULT_EPSILON
    unsafe: bool = False

    def __post_init__(self):
        if self.upsample is not None and (int(self.upsample) != self.upsample or self.upsample < 1):
            raise InvalidParams(f"upsample must be an integer >= 1, got {self.upsample}")
        _check_epsilon(self.inverse_epsilon, self.unsafe)

    def resolved_upsample(self, cc: CaptureConfig) -> int:
        return cc.decimation if self.upsample is None else int(self.upsample)


def _check_epsilon(eps: float, unsafe: bool) -> None:
    if not math.isfinite(eps) or eps > 1 or eps < 0 or (eps == 0 and not unsafe):
        raise EpsilonOutOfRange(
            f"inverse epsilon must lie in (0, 1] (0 only with unsafe inversion), got {eps}"
        )


def diffract(scene: ImageGrid, psf: PsfSpec, method: str = "fft") -> ImageGrid:
    """Circular convolution of every channel with the PSF.

    ``method="direct"`` convolves in the spatial domain with the compiled
    kernel; it is only sensible for compact kernels.  A delta PSF returns
    ``scene`` itself.
    """
    if psf.kind == "delta":
        return scene
    if method == "fft":
        otf = make_otf(psf, scene.height, scene.width)
        return idft2(multiply_spectra(dft2(scene), otf))
    if method == "direct":
        k = make_psf(psf, scene.height, scene.width).samples[0]
        out = np.stack(
            [kernels.circular_convolve(ch, k, psf.half_width) for ch in scene.samples]
        )
        return ImageGrid._wrap(out)
    raise InvalidParams(f"unknown convolution method {method!r}")


def _channel_noise(seed: int, channel: int, shape) -> np.ndarray:
    ss = np.random.SeedSequence([seed & _SEED_MASK, channel])
    return np.random.Generator(np.random.PCG64(ss)).standard_normal(shape)


def sense(img: ImageGrid, cfg: CaptureConfig) -> ImageGrid:
    """Sample onto the sensor lattice of pitch ``cfg.decimation``, then add noise.

    ``point`` picks the sample at offset (0, 0) of each block; ``area``
    averages the whole block.  Noise is drawn per channel from a generator
    seeded by ``(seed, channel)``.
    """
    d = int(cfg.decimation)
    c, h, w = img.shape
    if h % d or w % d:
        raise NotDivisible(f"image {h}x{w} is not divisible by decimation {d}")
    if cfg.sampling_mode == "point":
        out = img.samples[:, ::d, ::d].copy()
    else:
        out = img.samples.reshape(c, h // d, d, w // d, d).mean(axis=(2, 4))
    if cfg.noise_sigma > 0:
        for ch in range(c):
            out[ch] += cfg.noise_sigma * _channel_noise(cfg.seed, ch, out[ch].shape)
    return ImageGrid._wrap(out)


def _zero_pad_axis(bins: np.ndarray, axis: int, new_n: int) -> np.ndarray:
    n = bins.shape[axis]
    shape = list(bins.shape)
    shape[axis] = new_n
    out = np.zeros(shape, dtype=np.complex128)
    src = np.moveaxis(bins, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    if n % 2 == 0:
        half = n // 2
        dst[:half] = src[:half]
        dst[new_n - half + 1:] = src[half + 1:]
        # split the Nyquist bin between +n/2 and -n/2 to keep the output real
        dst[half] = 0.5 * src[half]
        dst[new_n - half] += 0.5 * src[half]
    else:
        half = (n - 1) // 2
        dst[:half + 1] = src[:half + 1]
        dst[new_n - half:] = src[n - half:]
    return out


def interpolate_fft(img: ImageGrid, factor: int) -> ImageGrid:
    """Trigonometric upsampling by ``factor`` via spectral zero padding.

    Sample amplitudes are preserved (the spectrum is scaled by factor**2).
    """
    if int(factor) != factor or factor < 1:
        raise InvalidParams(f"upsample factor must be an integer >= 1, got {factor}")
    u = int(factor)
    if u == 1:
        return img
    bins = dft2(img).bins
    padded = _zero_pad_axis(bins, 1, u * img.height)
    padded = _zero_pad_axis(padded, 2, u * img.width)
    return idft2(Spectrum._wrap(padded * (u * u)))


def box_otf(width: int, grid_h: int, grid_w: int) -> Spectrum:
    """Transfer function of the ``width x width`` block mean that precedes point sampling.

    The block for sample ``r`` covers ``[r, r + width)``, i.e. kernel offsets
    ``0, -1, ..., -(width - 1)``.
    """
    k = np.zeros((grid_h, grid_w))
    idx = -np.arange(width)
    k[np.ix_(idx % grid_h, idx % grid_w)] = 1.0 / (width * width)
    return dft2(ImageGrid(k))


def inverse_filter_otf(img: ImageGrid, otf: Spectrum, eps: float, unsafe: bool = False) -> ImageGrid:
    """Divide by ``otf`` where ``|H| >= eps * max|H|``; zero every other bin."""
    _check_epsilon(eps, unsafe)
    h = otf.bins
    mag = np.abs(h)
    # symmetric magnitude so the keep-mask is exactly conjugate-symmetric
    mag = 0.5 * (mag + negated_index(mag))
    keep = mag >= eps * mag.max()
    if unsafe and eps == 0:
        keep &= h != 0
    gain = np.zeros_like(h)
    gain[keep] = 1.0 / h[keep]
    return idft2(multiply_spectra(dft2(img), Spectrum._wrap(gain)))


def inverse_filter(
    img: ImageGrid, psf: PsfSpec, eps: float = DEFAULT_EPSILON, *, box_width: int = 1,
    unsafe: bool = False,
) -> ImageGrid:
    """Thresholded inverse of the PSF (optionally times a block-mean box) on ``img``'s grid."""
    _check_epsilon(eps, unsafe)
    if psf.kind == "delta" and box_width == 1:
        return img
    otf = make_otf(psf, img.height, img.width)
    if box_width > 1:
        otf = multiply_spectra(otf, box_otf(box_width, img.height, img.width))
    return inverse_filter_otf(img, otf, eps, unsafe)


@dataclass
class StageResult:
    """Intermediate images of one pipeline run plus per-stage wall time in ms."""

    images: dict[str, ImageGrid]
    timings_ms: dict[str, float]

    @property
    def output(self) -> ImageGrid:
        return next(reversed(self.images.values()))


class _Timer:
    def __init__(self):
        self.timings = {}

    def run(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        self.timings[name] = (time.perf_counter() - t0) * 1e3
        return out


def recovered_psf(cc: CaptureConfig, upsample: int) -> PsfSpec:
    """The capture PSF expressed on the recovered grid (pixel = D/U high-res pixels)."""
    return cc.psf.scaled(upsample / cc.decimation)


def reconstruct(
    captured: ImageGrid, cc: CaptureConfig, rc: ReconstructConfig, stop_after_interpolation: bool = False,
) -> StageResult:
    """Interpolate a sensor image and undo the known blur."""
    u = rc.resolved_upsample(cc)
    timer = _Timer()
    images = {"interpolated": timer.run("interpolate", interpolate_fft, captured, u)}
    if not stop_after_interpolation:
        box = u if cc.sampling_mode == "area" else 1
        images["recovered"] = timer.run(
            "inverse_filter", inverse_filter, images["interpolated"], recovered_psf(cc, u),
            rc.inverse_epsilon, box_width=box, unsafe=rc.unsafe,
        )
    return StageResult(images, timer.timings)


def hyperacuity_stages(scene: ImageGrid, cc: CaptureConfig, rc: ReconstructConfig) -> StageResult:
    timer = _Timer()
    blurred = timer.run("diffract", diffract, scene, cc.psf)
    captured = timer.run("sense", sense, blurred, cc)
    rest = reconstruct(captured, cc, rc)
    images = {"diffracted": blurred, "captured": captured, **rest.images}
    return StageResult(images, {**timer.timings, **rest.timings_ms})


def run_hyperacuity(scene: ImageGrid, cc: CaptureConfig, rc: ReconstructConfig) -> ImageGrid:
    """Blur with the PSF, sample at pitch D, interpolate by U, inverse-filter."""
    return hyperacuity_stages(scene, cc, rc).output


def baseline_stages(scene: ImageGrid, cc: CaptureConfig, upsample: int | None = None) -> StageResult:
    u = cc.decimation if upsample is None else upsample
    timer = _Timer()
    captured = timer.run("sense", sense, scene, cc)
    interpolated = timer.run("interpolate", interpolate_fft, captured, u)
    return StageResult({"captured": captured, "interpolated": interpolated}, timer.timings)


def run_baseline(scene: ImageGrid, cc: CaptureConfig, upsample: int | None = None) -> ImageGrid:
    """Diffraction-free capture followed by FFT interpolation only."""
    return baseline_stages(scene, cc, upsample).output


def check_recovered_shape(scene: ImageGrid, out: ImageGrid) -> None:
    if scene.shape != out.shape:
        raise DomainError(
            f"recovered grid {out.height}x{out.width} differs from scene {scene.height}x{scene.width}; "
            "use upsample equal to the decimation to compare against the scene"
        )
