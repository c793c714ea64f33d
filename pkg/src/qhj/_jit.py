"""Optional numba acceleration.

Kernels are written once in numba-compatible Python. When numba is missing,
or ``QHJ_BACKEND=numpy`` is set before import, :func:`njit` returns the
function unchanged and the same code runs in the interpreter.
"""

from __future__ import annotations

import os

BACKEND_ENV = "QHJ_BACKEND"

_requested = os.environ.get(BACKEND_ENV, "numba").strip().lower()

if _requested not in ("numba", "numpy"):
    raise ImportError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {_requested!r}")

HAVE_NUMBA = False
if _requested == "numba":
    try:
        import numba as _numba

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - depends on environment
        pass

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` with caching and GIL release, or the identity decorator."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def python_impl(func):
    """Return the uncompiled Python implementation of a kernel."""
    return getattr(func, "py_func", func)
