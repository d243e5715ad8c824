"""Process-global backend selection for the numeric hot paths.

Every hot kernel in this package is written once, in vectorized
numpy style that the numba compiler also accepts.  The ``hot``
decorator keeps the plain function as the numpy implementation and,
when the numba backend is active, swaps in a lazily jit-compiled
version of the same source.

The active backend comes from the GVFLAT_BACKEND environment variable
("auto", "numpy", "numba") and can be changed at runtime with
set_backend().  "auto" resolves to numba when it is importable and to
numpy otherwise.
"""

from __future__ import annotations

import os

VALID_BACKENDS = ("auto", "numpy", "numba")

_state = {"choice": os.environ.get("GVFLAT_BACKEND", "auto")}


class BackendError(RuntimeError):
    pass


def _numba_importable() -> bool:
    try:
        import numba  # noqa: F401
    except Exception:
        return False
    return True


def set_backend(name: str) -> None:
    """Select the numeric backend ("auto", "numpy" or "numba")."""
    if name not in VALID_BACKENDS:
        raise BackendError(f"unknown backend {name!r}, expected one of {VALID_BACKENDS}")
    if name == "numba" and not _numba_importable():
        raise BackendError("numba backend requested but numba is not importable")
    _state["choice"] = name


def get_backend() -> str:
    """Resolved backend name, always "numpy" or "numba"."""
    choice = _state["choice"]
    if choice not in VALID_BACKENDS:
        raise BackendError(f"invalid GVFLAT_BACKEND value {choice!r}")
    if choice == "auto":
        return "numba" if _numba_importable() else "numpy"
    return choice


def hot(fn):
    """Register a dual-backend kernel.

    The decorated function must be jit-compilable as written; the
    numpy path calls it untouched.
    """
    compiled = []

    def wrapper(*args):
        if get_backend() == "numba":
            if not compiled:
                from numba import njit

                compiled.append(njit(cache=False)(fn))
            return compiled[0](*args)
        return fn(*args)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.py_func = fn
    return wrapper
