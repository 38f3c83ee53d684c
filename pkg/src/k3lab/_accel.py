"""JIT selection for the floating-point kernels.

Numba is used when importable unless ``K3LAB_DISABLE_NUMBA`` is set to a
truthy value; otherwise ``njit`` is a pass-through and the kernels run as
plain Python/numpy.  The flag is read once, at import time.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("K3LAB_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("disabled by K3LAB_DISABLE_NUMBA")
    import numba as _nb

    HAS_NUMBA = True
except ImportError:
    _nb = None
    HAS_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAS_NUMBA:
        kwargs.setdefault("cache", True)
        return _nb.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def deco(func):
        return func

    return deco


def backend() -> str:
    return "numba" if HAS_NUMBA else "numpy"
