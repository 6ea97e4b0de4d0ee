"""Simulate diffraction-enhanced capture with few sensors and recover a
higher-resolution image by FFT interpolation and inverse filtering."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BandOutOfRange, DimensionMismatch, DomainError, EpsilonOutOfRange, GridTooLarge,
    HyperlensError, ImageFormatError, InvalidParams, NonHermitianSpectrum, NonPositiveInput,
    NotApplicable, NotDivisible, ParseError, SupportTooLarge,
)
from .grid import ImageGrid, Spectrum, dft2, idft2, multiply_spectra  # noqa: E402
from .metrics import MetricsReport, band_energy_fraction, evaluate, mse, psnr  # noqa: E402
from .pipeline import (  # noqa: E402
    CaptureConfig, ReconstructConfig, diffract, interpolate_fft, inverse_filter, run_baseline,
    run_hyperacuity, sense,
)
from .psf import PsfSpec, bessel_j1, make_otf, make_psf, rayleigh_pitch  # noqa: E402
from .scenes import CORPUS, SceneSpec, generate, parse_scene_spec, vernier_separability  # noqa: E402
