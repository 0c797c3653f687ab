"""Optional numba acceleration.

Hot kernels are decorated with :func:`njit`.  When numba is missing or the
environment variable ``VARFAM_DISABLE_NUMBA`` is set to a truthy value the
decorator is the identity and the kernels run as plain Python.
"""
from __future__ import annotations

import os

_DISABLED = os.environ.get("VARFAM_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    import numba as _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised through the env flag
    _numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` with ``cache=True``, or a no-op when acceleration is off."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(fn):
        return fn

    return wrap


def python_impl(fn):
    """Return the undecorated Python function behind a kernel."""
    return getattr(fn, "py_func", fn)
