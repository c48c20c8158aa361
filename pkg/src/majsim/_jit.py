"""Numba switch.

Set ``MAJSIM_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/numpy. Both paths consume random draws identically, so results are
bit-for-bit the same either way.
"""
import logging
import os

_FLAG = os.environ.get("MAJSIM_DISABLE_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _FLAG not in ("1", "true", "yes", "on")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USING_NUMBA = NUMBA_REQUESTED and numba is not None

if numba is not None:
    logging.getLogger("numba").setLevel(logging.WARNING)


def jit(func):
    """``numba.njit(cache=True, nogil=True)`` or identity when disabled.

    The undecorated function stays reachable as ``.py_func`` in both cases so
    benchmarks can compare the two paths in one process.
    """
    if USING_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    func.py_func = func
    return func
