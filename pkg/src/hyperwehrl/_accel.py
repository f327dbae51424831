"""Optional numba acceleration.

Set ``HYPERWEHRL_NO_NUMBA=1`` to force the pure numpy/Python code paths.
The choice is made once, at import time.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("HYPERWEHRL_NO_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # numba missing or switched off
    _njit = None
    HAVE_NUMBA = False


def jit_enabled() -> bool:
    """Return True when kernels are compiled with numba."""
    return HAVE_NUMBA


def njit(func):
    """Compile ``func`` with numba when enabled, else return it unchanged.

    The plain Python function stays reachable as ``func.py_func`` in both
    cases so benchmarks can time the two paths side by side.
    """
    if HAVE_NUMBA:
        compiled = _njit(cache=True)(func)
        return compiled
    func.py_func = func
    return func
