"""Kernel backend selection.

The numeric inner loops in :mod:`skizze.kernels` are written in a
numba-compilable numpy subset.  ``SKIZZE_BACKEND`` picks how they run:

* ``numba`` - require numba, fail loudly if it is missing,
* ``numpy`` - plain interpreted numpy (the fallback path),
* ``auto``  - numba when importable, numpy otherwise (default).

``benchmarks/bench_backends.py`` times the two paths against each other.
"""

import os

BACKEND_ENV = "SKIZZE_BACKEND"


def requested_backend() -> str:
    value = os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if value not in ("auto", "numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be auto|numba|numpy, got {value!r}")
    return value


def _resolve() -> str:
    req = requested_backend()
    if req == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        if req == "numba":
            raise
        return "numpy"


ACTIVE_BACKEND = _resolve()


def jit(func):
    """Compile ``func`` under the active backend (identity for numpy)."""
    if ACTIVE_BACKEND == "numba":
        from numba import njit
        return njit(cache=True)(func)
    return func
