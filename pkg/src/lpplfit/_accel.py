"""Backend selection for the hot numeric kernels.

Kernels are compiled with numba when it is importable and the environment
variable ``LPPLFIT_DISABLE_NUMBA`` is unset (or set to ``0``). Otherwise the
same kernel sources run as plain Python on top of numpy, and the few kernels
with a dedicated vectorised variant switch to it.
"""
import os

_FLAG = os.environ.get("LPPLFIT_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and _FLAG in ("", "0", "false", "no")
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(fn):
    """``numba.njit`` when the numba backend is active, identity otherwise."""
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn
