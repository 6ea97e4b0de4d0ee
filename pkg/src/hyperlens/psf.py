"""Point spread functions, their transfer functions and resolution diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import InvalidParams, NotApplicable, SupportTooLarge
from .grid import ImageGrid, Spectrum, dft2

# first positive zero of J1
J1_FIRST_ZERO = 3.8317059702075123156

PSF_KINDS = ("airy", "gaussian", "delta")
DEFAULT_RADIUS = 35.0
# gaussian tails are cut at this many sigmas by default
GAUSSIAN_SUPPORT_SIGMAS = 8.0


@dataclass(frozen=True)
class PsfSpec:
    """Kernel description.

    ``radius`` is in high-res pixels: the first intensity zero for
    ``airy``, the standard deviation for ``gaussian``; ignored for
    ``delta``.  ``support`` is the half-width of the square truncation
    window; ``None`` picks ``ceil(2 * radius)`` for airy and
    ``ceil(8 * radius)`` for gaussian.
    """

    kind: str = "airy"
    radius: float = DEFAULT_RADIUS
    support: int | None = None

    def __post_init__(self):
        if self.kind not in PSF_KINDS:
            raise InvalidParams(f"unknown PSF kind {self.kind!r}; expected one of {PSF_KINDS}")
        if self.kind == "delta":
            return
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidParams(f"{self.kind} radius must be > 0, got {self.radius}")
        if self.support is not None:
            if self.support < 1:
                raise InvalidParams(f"support must be >= 1, got {self.support}")
            if self.kind == "airy" and self.support < 2 * self.radius:
                raise InvalidParams(
                    f"airy support {self.support} must be >= 2*radius = {2 * self.radius:g}"
                )

    @property
    def half_width(self) -> int:
        if self.kind == "delta":
            return 0
        if self.support is not None:
            return int(self.support)
        if self.kind == "airy":
            return math.ceil(2 * self.radius)
        return math.ceil(GAUSSIAN_SUPPORT_SIGMAS * self.radius)

    def scaled(self, factor: float) -> "PsfSpec":
        """The same physical kernel on a grid whose pixels are ``1/factor`` as wide."""
        if self.kind == "delta" or factor == 1:
            return self
        support = None if self.support is None else math.ceil(self.support * factor)
        return replace(self, radius=self.radius * factor, support=support)


def bessel_j1(x: float) -> float:
    """Bessel function of the first kind, order one."""
    return float(kernels.j1(np.array([float(x)]))[0])


def airy_profile(r, radius: float):
    """Unnormalized Airy intensity ``(2 J1(v) / v)**2`` with ``v = z1 * r / radius``."""
    r = np.asarray(r, dtype=np.float64)
    v = J1_FIRST_ZERO * r / radius
    safe = np.where(v == 0.0, 1.0, v)
    return np.where(v == 0.0, 1.0, (2.0 * kernels.j1(safe) / safe) ** 2)


def _compact_kernel(spec: PsfSpec) -> np.ndarray:
    s = spec.half_width
    offsets = np.arange(-s, s + 1, dtype=np.float64)
    r = np.hypot(offsets[:, None], offsets[None, :])
    if spec.kind == "airy":
        k = airy_profile(r, spec.radius)
    elif spec.kind == "gaussian":
        k = np.exp(-0.5 * (r / spec.radius) ** 2)
    else:
        k = np.ones((1, 1))
    return k / k.sum()


def _check_fits(spec: PsfSpec, grid_h: int, grid_w: int) -> None:
    need = 2 * spec.half_width + 1
    if grid_h < need or grid_w < need:
        raise SupportTooLarge(
            f"{spec.kind} kernel needs a grid of at least {need}x{need}, got {grid_h}x{grid_w}"
        )


def make_psf(spec: PsfSpec, grid_h: int, grid_w: int) -> ImageGrid:
    """Kernel on a ``grid_h x grid_w`` grid in wrap-around layout, unit sum.

    Offset ``(dy, dx)`` from the centre is stored at ``[dy mod H, dx mod W]``
    so the kernel's DFT has zero phase.
    """
    _check_fits(spec, grid_h, grid_w)
    compact = _compact_kernel(spec)
    s = spec.half_width
    out = np.zeros((grid_h, grid_w))
    idx = np.arange(-s, s + 1)
    out[np.ix_(idx % grid_h, idx % grid_w)] = compact
    return ImageGrid(out)


@lru_cache(maxsize=32)
def make_otf(spec: PsfSpec, grid_h: int, grid_w: int) -> Spectrum:
    """Single-channel transfer function: the DFT of :func:`make_psf`."""
    return dft2(make_psf(spec, grid_h, grid_w))


def rayleigh_pitch(spec: PsfSpec) -> float:
    """Two-point Rayleigh separation in high-res pixels (the Airy first-zero radius)."""
    if spec.kind != "airy":
        raise NotApplicable(f"Rayleigh criterion is defined for airy kernels, not {spec.kind}")
    return float(spec.radius)


def incoherent_cutoff(spec: PsfSpec) -> float:
    """Spatial-frequency cutoff of the airy OTF in cycles per high-res pixel."""
    if spec.kind != "airy":
        raise NotApplicable(f"cutoff frequency is defined for airy kernels, not {spec.kind}")
    return J1_FIRST_ZERO / (math.pi * spec.radius)
