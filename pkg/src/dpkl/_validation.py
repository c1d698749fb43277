"""Small input validation helpers in the spirit of ``sklearn.utils.validation``."""

import math
import numbers

import numpy as np

from .exceptions import InputError


def check_data(x, *, min_length=1, name="data"):
    """Return ``x`` as a 1-D float64 array of finite values.

    A column vector of shape ``(n, 1)`` is flattened so that the estimator
    accepts the usual ``X`` layout.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise InputError(f"{name} needs at least {min_length} value(s), got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def check_finite_scalar(y, name="y"):
    try:
        value = float(y)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} must be a real number, got {y!r}") from exc
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {value}")
    return value


def check_positive(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise InputError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InputError(f"{name} must be positive and finite, got {value}")
    return value


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InputError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_rng(rng):
    """Accept a ``numpy.random.Generator`` or an integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(rng)
    raise InputError(
        "rng must be a numpy Generator, SeedSequence or integer seed; "
        f"got {type(rng).__name__}"
    )
