"""Compiled vs NumPy kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall time per kernel for each backend and checks that the
two agree.  The compiled module is optional; without it only the fallback
is timed.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hyperlens import _pykernels

try:
    from hyperlens import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    x = rng.uniform(-100, 100, 1_000_000)
    img = rng.random((256, 256))
    ker = np.zeros((256, 256))
    idx = np.arange(-7, 8) % 256
    ker[np.ix_(idx, idx)] = rng.random((15, 15))
    return [
        ("j1 (1e6 points)", lambda m: m.j1(x)),
        ("circular_convolve 256^2, 15x15", lambda m: m.circular_convolve(img, ker, 7)),
        ("annulus_coverage 500^2, ss=8", lambda m: m.annulus_coverage(500, 500, 250.0, 250.0, 148.0, 152.0, 8)),
    ]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    print(f"{'kernel':34s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}  max|diff|")
    for name, fn in cases():
        tp, ref = best_of(lambda: fn(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:34s} {tp * 1e3:10.2f} {'-':>10s}")
            continue
        tc, out = best_of(lambda: fn(_ckernels), args.repeat)
        diff = float(np.max(np.abs(out - ref)))
        print(f"{name:34s} {tp * 1e3:10.2f} {tc * 1e3:10.2f} {tp / tc:7.1f}x  {diff:.1e}")


if __name__ == "__main__":
    main()
