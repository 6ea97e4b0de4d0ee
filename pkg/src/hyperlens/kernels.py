"""Hot-loop kernels, compiled when available.

The Cython module ``hyperlens._ckernels`` is used if it was built at
install time; otherwise the NumPy versions in ``hyperlens._pykernels``
are used.  Setting ``HYPERLENS_PURE_PYTHON=1`` forces the fallback.
``BACKEND`` names the implementation that was selected.
"""
import os

from . import _pykernels

_impl = _pykernels
BACKEND = "python"

if os.environ.get("HYPERLENS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

j1 = _impl.j1
circular_convolve = _impl.circular_convolve
annulus_coverage = _impl.annulus_coverage

__all__ = ["BACKEND", "j1", "circular_convolve", "annulus_coverage"]
