"""Kernel compilation switch.

Set ``MDIM_DISABLE_NUMBA=1`` to run the hot loops as plain numpy/Python code.
The flag is read once at import time.
"""

import os

import numpy as np

DISABLED = os.environ.get("MDIM_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

# the bundled TBB is too old for numba; the workqueue layer needs nothing extra
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not DISABLED


def njit(*args, **kwargs):
    if USE_NUMBA:
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


if USE_NUMBA:
    prange = numba.prange
else:
    prange = range


def quiet_overflow():
    """Context manager silencing uint64 wrap-around warnings in fallback mode."""
    return np.errstate(over="ignore")


def set_threads(n: int | None) -> None:
    if n and USE_NUMBA:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
