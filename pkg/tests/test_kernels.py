"""Compiled kernels against the NumPy fallback and against mpmath."""
import mpmath
import numpy as np
import pytest

from hyperlens import _pykernels, kernels
from oracles import loop_circular_convolution

try:
    from hyperlens import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

needs_compiled = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def _j1_mp(x):
    return float(mpmath.besselj(1, x))


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("impl", [_pykernels, pytest.param(_ckernels, marks=needs_compiled)],
                         ids=["python", "cython"])
def test_j1_against_mpmath(impl):
    xs = np.concatenate([np.linspace(-100, 100, 4001), [0.0, 7.999999, 8.0, 8.000001]])
    ref = np.array([_j1_mp(x) for x in xs])
    assert np.max(np.abs(impl.j1(xs) - ref)) < 1e-7


@pytest.mark.parametrize("impl", [_pykernels, pytest.param(_ckernels, marks=needs_compiled)],
                         ids=["python", "cython"])
def test_j1_matches_long_power_series(impl):
    # 60-term series in exact rationals, independent of the kernel's 40-term float loop
    xs = np.linspace(-8, 8, 161)
    for x in xs:
        xm = mpmath.mpf(float(x))
        s = mpmath.nsum(lambda k: (-1) ** k * (xm / 2) ** (2 * k + 1) / (mpmath.factorial(k) * mpmath.factorial(k + 1)),
                        [0, 60])
        assert abs(impl.j1(np.array([x]))[0] - float(s)) < 1e-12


def test_j1_continuous_at_switchover():
    lo = kernels.j1(np.array([np.nextafter(8.0, 0.0)]))[0]
    hi = kernels.j1(np.array([np.nextafter(8.0, 9.0)]))[0]
    assert abs(lo - hi) < 1e-7


@needs_compiled
def test_compiled_and_fallback_agree_j1(rng):
    xs = rng.uniform(-150, 150, 20000)
    np.testing.assert_allclose(_ckernels.j1(xs), _pykernels.j1(xs), rtol=0, atol=1e-14)


@needs_compiled
@pytest.mark.parametrize("support", [-1, 0, 2, 5])
def test_compiled_and_fallback_agree_convolution(rng, support):
    img, ker = rng.random((13, 16)), rng.random((13, 16))
    np.testing.assert_allclose(
        _ckernels.circular_convolve(img, ker, support), _pykernels.circular_convolve(img, ker, support),
        rtol=1e-13, atol=1e-13,
    )


@needs_compiled
def test_compiled_and_fallback_agree_coverage():
    args = (40, 50, 19.3, 24.8, 9.5, 13.5, 6)
    np.testing.assert_array_equal(_ckernels.annulus_coverage(*args), _pykernels.annulus_coverage(*args))


@pytest.mark.parametrize("impl", [_pykernels, pytest.param(_ckernels, marks=needs_compiled)],
                         ids=["python", "cython"])
def test_full_support_convolution_matches_loops(rng, impl):
    a, b = rng.random((6, 7)), rng.random((6, 7))
    np.testing.assert_allclose(impl.circular_convolve(a, b), loop_circular_convolution(a, b), rtol=1e-12)


def test_coverage_bounds_and_area():
    cov = kernels.annulus_coverage(200, 200, 100.2, 99.7, 40.0, 60.0, 16)
    assert cov.min() >= 0 and cov.max() <= 1
    assert cov.sum() == pytest.approx(np.pi * (60 ** 2 - 40 ** 2), rel=2e-3)
