"""Extended nonnegative reals [0, inf] with the 0*inf = inf*0 = 0 product."""

from __future__ import annotations

import numpy as np

INF = float("inf")


def xmul(a, b):
    """Product on [0, inf] patched so that 0*inf = inf*0 = 0.

    Accepts scalars or numpy arrays (broadcasting like ``*``).
    """
    if np.isscalar(a) and np.isscalar(b):
        if a == 0.0 or b == 0.0:
            return 0.0
        return a * b
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a * b
    return np.where((a == 0.0) | (b == 0.0), 0.0, out)


def as_scalar(x):
    """Collapse a 0-d numpy value to a plain float; pass arrays through."""
    if np.isscalar(x):
        return float(x)
    arr = np.asarray(x)
    if arr.ndim == 0:
        return float(arr)
    return arr
