"""Digamma function via upward recurrence and the asymptotic series."""

import numpy as np

from .exceptions import InputError

__all__ = ["digamma"]

# Below this threshold the argument is shifted up with psi(x) = psi(x+1) - 1/x.
_ASYMPTOTIC_FROM = 10.0

# B_{2k} / (2k) for k = 1..7.
_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def _asymptotic(x):
    inv2 = 1.0 / (x * x)
    tail = 0.0
    for coef in reversed(_SERIES):
        tail = (tail + coef) * inv2
    return np.log(x) - 0.5 / x - tail


def digamma(x):
    """Logarithmic derivative of the gamma function for ``x > 0``.

    Accepts scalars or arrays.  Absolute error is below 1e-10 for
    ``x >= 1e-3``; closer to zero the error is relative to the ``-1/x`` pole.
    """
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise InputError("digamma is only defined here for finite x > 0")
    shift = np.zeros_like(arr)
    work = arr.copy()
    while True:
        small = work < _ASYMPTOTIC_FROM
        if not np.any(small):
            break
        shift[small] += 1.0 / work[small]
        work[small] += 1.0
    out = _asymptotic(work) - shift
    return float(out) if out.ndim == 0 else out
