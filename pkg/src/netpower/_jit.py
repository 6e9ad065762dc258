"""Optional numba acceleration.

Kernels are written once as plain loops and compiled with ``njit`` when numba
is importable. Setting ``NETPOWER_DISABLE_JIT=1`` forces the vectorized numpy
implementations instead; the switch is read once, at import time.
``NETPOWER_THREADS`` caps numba's worker pool.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("NETPOWER_DISABLE_JIT", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None

HAVE_NUMBA = _numba is not None
USE_JIT = HAVE_NUMBA and not _DISABLED

if HAVE_NUMBA:
    if "NUMBA_THREADING_LAYER" not in os.environ:
        _numba.config.THREADING_LAYER = "workqueue"
    _threads = os.environ.get("NETPOWER_THREADS")
    if _threads:
        try:
            _numba.set_num_threads(max(1, min(int(_threads), _numba.config.NUMBA_NUM_THREADS)))
        except ValueError:
            pass


def njit(*args, **kwargs):
    """``numba.njit`` with caching on, or an identity decorator without numba."""
    bare = len(args) == 1 and callable(args[0]) and not kwargs
    if not HAVE_NUMBA:
        return args[0] if bare else (lambda f: f)
    kwargs.setdefault("cache", True)
    if bare:
        return _numba.njit(cache=True)(args[0])
    return _numba.njit(*args, **kwargs)


prange = _numba.prange if HAVE_NUMBA else range


def backend() -> str:
    return "numba" if USE_JIT else "numpy"
