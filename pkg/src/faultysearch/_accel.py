"""Backend switch for the hot kernels.

Numba is used when it imports and FAULTYSEARCH_NO_NUMBA is unset (or 0).
Setting FAULTYSEARCH_NO_NUMBA=1 selects the pure-numpy implementations,
which produce bit-identical results.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("FAULTYSEARCH_NO_NUMBA", "0") in ("", "0")
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(fn):
    """Compile with numba when available, else return fn unchanged."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
