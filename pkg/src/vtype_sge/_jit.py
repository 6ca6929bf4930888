"""Optional numba compilation for the numeric kernels.

Every kernel in the package is written as plain numpy/Python that numba can
compile in nopython mode. Setting ``VTYPE_SGE_DISABLE_JIT=1`` (or running
without numba installed) leaves the kernels as ordinary Python functions.
"""
import os

_FLAG = "VTYPE_SGE_DISABLE_JIT"

JIT_DISABLED = os.environ.get(_FLAG, "").strip().lower() in ("1", "true", "yes", "on")

try:
    if JIT_DISABLED:
        raise ImportError
    from numba import njit as _numba_njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def njit(f):
    """Compile ``f`` with numba when available and not disabled."""
    if not HAS_NUMBA:
        return f
    return _numba_njit(cache=True)(f)


def python_version(f):
    """Return the uncompiled implementation behind a kernel."""
    return getattr(f, "py_func", f)
