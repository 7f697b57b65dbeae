"""Backend selection for the compiled kernels.

Set ``SPACINGLAB_NUMBA=0`` before import to force the pure-numpy kernels.
"""
import os

_FLAG = os.environ.get("SPACINGLAB_NUMBA", "1").strip().lower()
_WANT = _FLAG not in ("0", "false", "no", "off")

try:
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

HAVE_NUMBA = _numba is not None
USE_NUMBA = HAVE_NUMBA and _WANT


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def backend():
    return "numba" if USE_NUMBA else "numpy"
