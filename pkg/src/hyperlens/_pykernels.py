"""NumPy implementations of the hot kernels.

These are the reference behaviour for ``_ckernels.pyx``; both must agree
to rounding.  Keep the two files in step.
"""
import math

import numpy as np

# J1 evaluation: power series up to SERIES_LIMIT, Hankel asymptotic beyond.
SERIES_LIMIT = 8.0
SERIES_TERMS = 40
ASYMPTOTIC_TERMS = 16
_THREE_PI_4 = 0.75 * math.pi


def _j1_series(x):
    half = 0.5 * x
    h2 = half * half
    term = half.copy()
    total = half.copy()
    for k in range(1, SERIES_TERMS):
        term *= -h2 / (k * (k + 1))
        total += term
    return total


def _j1_asymptotic(x):
    # J1(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)), chi = x - 3pi/4, mu = 4
    z = 8.0 * x
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, ASYMPTOTIC_TERMS + 1):
        term = term * ((4.0 - (2 * k - 1) ** 2) / (k * z))
        if k % 2 == 0:
            p += term if (k // 2) % 2 == 0 else -term
        else:
            q += term if ((k - 1) // 2) % 2 == 0 else -term
    chi = x - _THREE_PI_4
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def j1(x):
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x).ravel()
    out = np.empty_like(ax)
    small = ax <= SERIES_LIMIT
    out[small] = _j1_series(ax[small])
    out[~small] = _j1_asymptotic(ax[~small])
    return (np.sign(x).ravel() * out).reshape(x.shape)


def circular_convolve(image, kernel, support=-1):
    """Direct circular convolution of two same-size 2-D arrays.

    ``kernel`` is in wrap-around layout (offset ``(dy, dx)`` stored at
    ``[dy mod H, dx mod W]``).  With ``support >= 0`` only offsets with
    ``|dy|, |dx| <= support`` contribute.
    """
    image = np.asarray(image, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    h, w = image.shape
    if support < 0 or 2 * support + 1 > h:
        rows = range(h)
    else:
        rows = range(-support, support + 1)
    if support < 0 or 2 * support + 1 > w:
        cols = range(w)
    else:
        cols = range(-support, support + 1)
    out = np.zeros_like(image)
    for dy in rows:
        for dx in cols:
            k = kernel[dy % h, dx % w]
            if k != 0.0:
                out += k * np.roll(image, (dy, dx), axis=(0, 1))
    return out


def annulus_coverage(height, width, cy, cx, r_in, r_out, supersample):
    """Fraction of each pixel covered by the ring ``r_in <= r < r_out``.

    Pixel ``(i, j)`` is the unit square centred on ``(i, j)``; coverage is
    estimated on a ``supersample x supersample`` grid of sub-pixel centres.
    """
    out = np.zeros((height, width))
    ys = np.arange(height, dtype=np.float64)[:, None] - cy
    xs = np.arange(width, dtype=np.float64)[None, :] - cx
    rin2 = r_in * r_in
    rout2 = r_out * r_out
    n = int(supersample)
    for a in range(n):
        dy = (a + 0.5) / n - 0.5
        yy = (ys + dy) ** 2
        for b in range(n):
            dx = (b + 0.5) / n - 0.5
            r2 = yy + (xs + dx) ** 2
            out += (r2 >= rin2) & (r2 < rout2)
    return out / (n * n)
