# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_pykernels``.

Same algorithms and term counts as the NumPy fallback so the two agree
to rounding.
"""
import numpy as np

from libc.math cimport cos, sin, sqrt, fabs, M_PI

cdef double SERIES_LIMIT = 8.0
cdef int SERIES_TERMS = 40
cdef int ASYMPTOTIC_TERMS = 16


cdef inline double _j1_scalar(double x) nogil:
    cdef double ax = fabs(x)
    cdef double half, h2, term, total, z, p, q, chi, res
    cdef int k
    if ax <= SERIES_LIMIT:
        half = 0.5 * ax
        h2 = half * half
        term = half
        total = half
        for k in range(1, SERIES_TERMS):
            term *= -h2 / (k * (k + 1.0))
            total += term
        res = total
    else:
        z = 8.0 * ax
        p = 1.0
        q = 0.0
        term = 1.0
        for k in range(1, ASYMPTOTIC_TERMS + 1):
            term = term * ((4.0 - (2 * k - 1) * (2 * k - 1)) / (k * z))
            if k % 2 == 0:
                if (k // 2) % 2 == 0:
                    p += term
                else:
                    p -= term
            else:
                if ((k - 1) // 2) % 2 == 0:
                    q += term
                else:
                    q -= term
        chi = ax - 0.75 * M_PI
        res = sqrt(2.0 / (M_PI * ax)) * (p * cos(chi) - q * sin(chi))
    if x < 0:
        return -res
    return res


def j1(x):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    flat = arr.ravel()
    out = np.empty_like(flat)
    cdef const double[::1] src = flat
    cdef double[::1] dst = out
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = _j1_scalar(src[i])
    return out.reshape(arr.shape)


def circular_convolve(image, kernel, Py_ssize_t support=-1):
    cdef const double[:, ::1] img = np.ascontiguousarray(image, dtype=np.float64)
    cdef const double[:, ::1] ker = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    out_arr = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t y0, y1, x0, x1, dy, dx, ky, kx, y, x, sy, sx
    cdef double k
    if support < 0 or 2 * support + 1 > h:
        y0, y1 = 0, h
    else:
        y0, y1 = -support, support + 1
    if support < 0 or 2 * support + 1 > w:
        x0, x1 = 0, w
    else:
        x0, x1 = -support, support + 1
    with nogil:
        for dy in range(y0, y1):
            ky = ((dy % h) + h) % h
            for dx in range(x0, x1):
                kx = ((dx % w) + w) % w
                k = ker[ky, kx]
                if k == 0.0:
                    continue
                for y in range(h):
                    sy = y - ky
                    if sy < 0:
                        sy += h
                    for x in range(w):
                        sx = x - kx
                        if sx < 0:
                            sx += w
                        out[y, x] += k * img[sy, sx]
    return out_arr


def annulus_coverage(Py_ssize_t height, Py_ssize_t width, double cy, double cx,
                     double r_in, double r_out, int supersample):
    out_arr = np.zeros((height, width), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double rin2 = r_in * r_in, rout2 = r_out * r_out
    cdef double n = supersample
    cdef double n2 = supersample * supersample
    cdef Py_ssize_t i, j
    cdef int a, b, count
    cdef double yy, r2, ddy, ddx
    with nogil:
        for i in range(height):
            for j in range(width):
                count = 0
                for a in range(supersample):
                    ddy = (i - cy) + ((a + 0.5) / n - 0.5)
                    yy = ddy * ddy
                    for b in range(supersample):
                        ddx = (j - cx) + ((b + 0.5) / n - 0.5)
                        r2 = yy + ddx * ddx
                        if r2 >= rin2 and r2 < rout2:
                            count += 1
                out[i, j] = count / n2
    return out_arr
