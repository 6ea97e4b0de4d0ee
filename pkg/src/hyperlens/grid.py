"""Raster and spectrum containers plus the 2-D DFT contract.

Convention, used everywhere in the package: the forward transform is
unnormalized, the inverse carries the 1/(N*M) factor, and bins use the
standard DFT ordering with DC at ``[0, 0]``.  All convolutions are
circular.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, DomainError, NonHermitianSpectrum

HERMITIAN_RTOL = 1e-8


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _as_chw(data, dtype) -> np.ndarray:
    arr = np.array(data, dtype=dtype, copy=True)
    if arr.ndim == 2:
        arr = arr[np.newaxis]
    if arr.ndim != 3:
        raise DimensionMismatch(f"expected a 2-D or (channels, H, W) array, got shape {arr.shape}")
    c, h, w = arr.shape
    if c not in (1, 3):
        raise DimensionMismatch(f"channels must be 1 or 3, got {c}")
    if h < 1 or w < 1:
        raise DimensionMismatch(f"empty raster {h}x{w}")
    return arr


class ImageGrid:
    """Immutable real raster indexed ``[channel, row, col]``, float64.

    Samples are nominally in [0, 1] but are not clipped until export.
    """

    __slots__ = ("_samples",)

    def __init__(self, samples):
        arr = _as_chw(samples, np.float64)
        if not np.all(np.isfinite(arr)):
            raise DomainError("image samples must be finite")
        self._samples = _frozen(arr)

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "ImageGrid":
        # trusted fast path for arrays produced inside the package
        obj = cls.__new__(cls)
        if not np.all(np.isfinite(arr)):
            raise DomainError("operation produced non-finite samples")
        obj._samples = _frozen(np.ascontiguousarray(arr, dtype=np.float64))
        return obj

    @classmethod
    def constant(cls, value: float, height: int, width: int, channels: int = 1) -> "ImageGrid":
        return cls(np.full((channels, height, width), float(value)))

    @property
    def samples(self) -> np.ndarray:
        return self._samples

    @property
    def shape(self) -> tuple[int, int, int]:
        return self._samples.shape

    @property
    def channels(self) -> int:
        return self._samples.shape[0]

    @property
    def height(self) -> int:
        return self._samples.shape[1]

    @property
    def width(self) -> int:
        return self._samples.shape[2]

    def clipped(self, lo: float = 0.0, hi: float = 1.0) -> "ImageGrid":
        return ImageGrid._wrap(np.clip(self._samples, lo, hi))

    def __eq__(self, other):
        if not isinstance(other, ImageGrid):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._samples, other._samples)

    __hash__ = None

    def __repr__(self):
        return f"ImageGrid(channels={self.channels}, height={self.height}, width={self.width})"


class Spectrum:
    """Immutable complex bins indexed ``[channel, row, col]`` in DFT order."""

    __slots__ = ("_bins",)

    def __init__(self, bins):
        arr = _as_chw(bins, np.complex128)
        self._bins = _frozen(arr)

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Spectrum":
        obj = cls.__new__(cls)
        obj._bins = _frozen(np.ascontiguousarray(arr, dtype=np.complex128))
        return obj

    @property
    def bins(self) -> np.ndarray:
        return self._bins

    @property
    def shape(self) -> tuple[int, int, int]:
        return self._bins.shape

    @property
    def channels(self) -> int:
        return self._bins.shape[0]

    @property
    def height(self) -> int:
        return self._bins.shape[1]

    @property
    def width(self) -> int:
        return self._bins.shape[2]

    def __repr__(self):
        return f"Spectrum(channels={self.channels}, height={self.height}, width={self.width})"


def negated_index(bins: np.ndarray) -> np.ndarray:
    """Return ``b[..., -k mod N, -l mod M]`` for every bin ``[k, l]``."""
    return np.roll(np.flip(bins, axis=(-2, -1)), 1, axis=(-2, -1))


def hermitian_residual(bins: np.ndarray) -> float:
    """Largest deviation from conjugate symmetry, relative to the largest bin."""
    scale = float(np.max(np.abs(bins))) if bins.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(bins - np.conj(negated_index(bins))))) / scale


def dft2(img: ImageGrid) -> Spectrum:
    """Unnormalized forward 2-D DFT of every channel."""
    return Spectrum._wrap(np.fft.fft2(img.samples, axes=(-2, -1)))


def idft2(spec: Spectrum) -> ImageGrid:
    """Normalized inverse 2-D DFT; the spectrum must be Hermitian.

    The imaginary residue left by rounding is discarded only after the
    symmetry check passes.
    """
    resid = hermitian_residual(spec.bins)
    if resid > HERMITIAN_RTOL:
        raise NonHermitianSpectrum(
            f"spectrum is not conjugate-symmetric (relative residual {resid:.3e})"
        )
    return ImageGrid._wrap(np.fft.ifft2(spec.bins, axes=(-2, -1)).real)


def multiply_spectra(a: Spectrum, b: Spectrum) -> Spectrum:
    """Element-wise product; a single-channel ``b`` broadcasts over ``a``."""
    if a.shape[1:] != b.shape[1:]:
        raise DimensionMismatch(f"spectra {a.shape} and {b.shape} differ in size")
    if b.channels not in (1, a.channels):
        raise DimensionMismatch(f"cannot broadcast {b.channels} channels over {a.channels}")
    return Spectrum._wrap(a.bins * b.bins)
