"""Numba switch.

The hot loops in :mod:`jointsig._kernels` exist twice: a numba ``@njit``
version and a pure-numpy version.  Numba is used when it imports and the
environment variable ``JOINTSIG_DISABLE_NUMBA`` is unset (or ``0``).
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("JOINTSIG_DISABLE_NUMBA", "0").lower() in (
    "",
    "0",
    "false",
    "no",
)


def njit(func):
    if not NUMBA_AVAILABLE:
        return func
    return numba.njit(cache=True, nogil=True)(func)
