"""Reconstruction quality: MSE, PSNR, spectral band energy, CSV reports."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BandOutOfRange, DimensionMismatch, InvalidParams
from .grid import ImageGrid

# +inf is the PSNR of identical images; never substituted by a large finite number
INFINITE_PSNR = math.inf

CSV_HEADER = (
    "scene", "pipeline", "D", "U", "psf_kind", "psf_radius", "eps", "noise_sigma", "seed",
    "psnr_r", "psnr_g", "psnr_b", "psnr_pooled", "mse_pooled",
)


def _check_same(a: ImageGrid, b: ImageGrid) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"images differ in shape: {a.shape} vs {b.shape}")


def mse(a: ImageGrid, b: ImageGrid) -> tuple[float, ...]:
    """Per-channel mean squared difference."""
    _check_same(a, b)
    diff = a.samples - b.samples
    return tuple(float(v) for v in np.mean(diff * diff, axis=(1, 2)))


def psnr_from_mse(value: float, peak: float = 1.0) -> float:
    if value == 0:
        return INFINITE_PSNR
    return 10.0 * math.log10(peak * peak / value)


@dataclass(frozen=True)
class Psnr:
    per_channel: tuple[float, ...]
    pooled: float


def psnr(a: ImageGrid, b: ImageGrid, peak: float = 1.0) -> Psnr:
    """``10 log10(peak^2 / MSE)`` per channel and for the channel-pooled MSE."""
    if not (peak > 0 and math.isfinite(peak)):
        raise InvalidParams(f"peak must be > 0, got {peak}")
    per = mse(a, b)
    pooled = sum(per) / len(per)
    return Psnr(tuple(psnr_from_mse(m, peak) for m in per), psnr_from_mse(pooled, peak))


def band_energy_fraction(img: ImageGrid, band: float) -> float:
    """Share of spectral energy with ``|k_row| <= band*H/2`` and ``|k_col| <= band*W/2``.

    ``band`` is a fraction of the Nyquist frequency.  Energy is pooled
    across channels; an all-zero image counts as fully in band.
    """
    if not (0 < band <= 1):
        raise BandOutOfRange(f"band must lie in (0, 1], got {band}")
    _, h, w = img.shape
    power = np.abs(np.fft.fft2(img.samples, axes=(-2, -1))) ** 2
    ky = np.abs(np.fft.fftfreq(h) * h)
    kx = np.abs(np.fft.fftfreq(w) * w)
    inside = (ky[:, None] <= band * h / 2) & (kx[None, :] <= band * w / 2)
    total = float(power.sum())
    if total == 0.0 or inside.all():
        return 1.0
    return min(1.0, float(power[:, inside].sum()) / total)


@dataclass
class MetricsReport:
    mse: tuple[float, ...]
    psnr: tuple[float, ...]
    psnr_pooled: float
    mse_pooled: float
    peak: float = 1.0
    notes: list[str] = field(default_factory=list)


def evaluate(reference: ImageGrid, estimate: ImageGrid, peak: float = 1.0, clip: bool = True) -> MetricsReport:
    """Compare ``estimate`` against ``reference``; the estimate is clipped to [0, peak] first."""
    if clip:
        estimate = estimate.clipped(0.0, peak)
    per = mse(reference, estimate)
    pooled = sum(per) / len(per)
    return MetricsReport(
        mse=per,
        psnr=tuple(psnr_from_mse(m, peak) for m in per),
        psnr_pooled=psnr_from_mse(pooled, peak),
        mse_pooled=pooled,
        peak=peak,
    )


def format_value(value) -> str:
    """Deterministic CSV text for a cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def csv_row(
    scene: str, pipeline: str, decimation: int, upsample: int, psf_kind: str, psf_radius: float,
    eps: float, noise_sigma: float, seed: int, report: MetricsReport,
) -> dict[str, str]:
    """One row of the comparison schema; mono images leave psnr_g/psnr_b empty."""
    channel_psnr = list(report.psnr) + [None] * (3 - len(report.psnr))
    values = (
        scene, pipeline, decimation, upsample, psf_kind, psf_radius, eps, noise_sigma, seed,
        *[None if p is None else round(p, 6) for p in channel_psnr],
        round(report.psnr_pooled, 6), float(f"{report.mse_pooled:.10e}"),
    )
    return {k: format_value(v) for k, v in zip(CSV_HEADER, values)}


def write_csv(rows, stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def csv_text(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(stream) -> list[dict[str, str]]:
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise InvalidParams(f"unexpected CSV header {reader.fieldnames}")
    return list(reader)
