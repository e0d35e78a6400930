"""JIT switch for the hot kernels.

Every kernel in the package is written as a plain Python function over numpy
arrays and integers, then wrapped with :func:`jit`.  With numba importable and
``REFBOUND_NUMBA`` unset (or truthy) the wrapper compiles the function in
nopython mode with the GIL released; with ``REFBOUND_NUMBA=0`` the original
Python function is returned unchanged, which is slow but has no dependency
beyond numpy.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("REFBOUND_NUMBA", "1").strip().lower()

try:
    if _FLAG in ("0", "false", "no", "off"):
        raise ImportError("disabled by REFBOUND_NUMBA")
    import numba

    NUMBA_ENABLED = True
except ImportError:
    numba = None
    NUMBA_ENABLED = False


def jit(fn):
    if not NUMBA_ENABLED:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "python"
