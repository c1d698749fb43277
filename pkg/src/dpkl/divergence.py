"""Spacing-based entropy and Kullback-Leibler estimators for discrete measures.

For a measure ``sum_i J_i delta(Y_(i))`` with sorted atoms, the entropy
estimate is

    H = sum_i J_i log((Y_(i+m) - Y_(i-m)) / c_i)

where out-of-range order statistics are clamped to the first/last atom and
``c_i`` is a window sum of the weights (see :func:`c_weights`).  The KL
divergence to a continuous model with density ``f`` is then
``-H - sum_i J_i log f(Y_(i))``.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._validation import check_count, check_positive, check_rng
from .dirichlet_process import MIN_TRUNCATION, DiscreteMeasure, stick_break_weights
from .exceptions import EstimatorError, InputError
from .special import digamma

__all__ = [
    "DivergenceSample",
    "WindowConfig",
    "c_weights",
    "digamma",
    "entropy_estimate",
    "expected_prior_kl",
    "kl_estimate",
    "kl_location_normal",
    "prior_kl_uniform_fastpath",
    "window_size",
]

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def max_window(N):
    return (N - 1) // 2


@dataclass(frozen=True)
class WindowConfig:
    """Spacing half-window ``m`` chosen for ``n_effective`` atoms."""

    m: int
    n_effective: int

    def __post_init__(self):
        if not 1 <= self.m <= max_window(self.n_effective):
            raise InputError(
                f"m={self.m} is outside [1, {max_window(self.n_effective)}] "
                f"for {self.n_effective} atoms"
            )

    @classmethod
    def for_atoms(cls, N):
        return cls(window_size(N), N)


def window_size(N):
    """``floor(sqrt(N) + 0.5)`` clamped into ``[1, (N - 1) // 2]``."""
    N = check_count(N, "N", minimum=MIN_TRUNCATION)
    m = math.floor(math.sqrt(N) + 0.5)
    return max(1, min(m, max_window(N)))


def _check_window(m, N):
    m = check_count(m, "m")
    if m > max_window(N):
        raise InputError(f"m={m} is too large for {N} atoms (max {max_window(N)})")
    return m


def c_weights(weights, m):
    """Window sums of the weights that normalise each spacing.

    With 1-based indices::

        c_i = J_2 + ... + J_{i+m}          for 1 <= i <= m
        c_i = J_{i-m+1} + ... + J_{i+m}    for m < i <= N - m
        c_i = J_{i-m+1} + ... + J_N        for N - m < i <= N

    Sums are accumulated directly rather than as differences of a global
    prefix sum, which would cancel to zero for the tiny trailing weights of
    stick-breaking draws.
    """
    J = np.asarray(weights, dtype=np.float64)
    N = J.size
    m = _check_window(m, N)
    c = np.empty(N)
    c[:m] = np.cumsum(J[1 : 2 * m])[m - 1 :]
    c[m : N - m] = sliding_window_view(J[1:], 2 * m).sum(axis=1)
    c[N - m :] = np.cumsum(J[::-1])[: 2 * m][::-1][1 : m + 1]
    bad = (c <= 0) & (J > 0)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0]) + 1
        raise EstimatorError(f"window weight c_{i} is zero at a positive-weight atom")
    return c


def _log_spacing_terms(atoms, weights, m):
    N = atoms.size
    idx = np.arange(N)
    spacing = atoms[np.minimum(idx + m, N - 1)] - atoms[np.maximum(idx - m, 0)]
    c = c_weights(weights, m)
    keep = weights > 0
    # Zero-weight atoms contribute nothing (J log J -> 0).
    return weights[keep], np.log(spacing[keep]) - np.log(c[keep])


def _entropy(atoms, weights, m):
    if np.any(np.diff(atoms) <= 0):
        raise EstimatorError("entropy estimate needs strictly increasing atoms; merge ties first")
    w, logs = _log_spacing_terms(atoms, weights, m)
    return float(np.dot(w, logs))


def entropy_estimate(measure, m):
    """Weighted spacing estimate of the differential entropy of ``measure``."""
    if not measure.is_merged:
        raise InputError("measure has duplicate atoms; call merge_atoms first")
    m = _check_window(m, len(measure))
    return _entropy(measure.atoms, measure.weights, m)


def kl_estimate(measure, model, m):
    """Estimate of the KL divergence from ``measure`` to ``model``.

    Small negative values are possible for finite truncations.
    """
    H = entropy_estimate(measure, m)
    logf = np.asarray(model.logpdf(measure.atoms), dtype=np.float64)
    outside = ~np.isfinite(logf)
    if np.any(outside):
        k = int(np.flatnonzero(outside)[0])
        raise EstimatorError(
            f"atom {measure.atoms[k]!r} (index {k}) lies outside the support of {model}"
        )
    return -H - float(np.dot(measure.weights, logf))


def kl_location_normal(measure, xbar, m):
    """KL estimate against ``N(xbar, 1)`` using the closed-form log density."""
    H = entropy_estimate(measure, m)
    dev = measure.atoms - float(xbar)
    return -H + _HALF_LOG_2PI + 0.5 * float(np.dot(measure.weights, dev * dev))


def prior_kl_uniform_fastpath(a, N, m, rng):
    """One draw of the prior divergence using uniform order statistics.

    When the DP base equals the model, the prior law of the divergence does
    not depend on the model, so the atoms can be replaced by uniforms and
    the model density term drops out.
    """
    a = check_positive(a, "a")
    N = check_count(N, "N", minimum=MIN_TRUNCATION)
    m = _check_window(m, N)
    rng = check_rng(rng)
    weights = stick_break_weights(a, N, rng)
    u = rng.random(N)
    order = np.argsort(u, kind="stable")
    return -_entropy(u[order], weights[order], m)


def expected_prior_kl(a, N, m):
    """Expected prior divergence for DP(a, model) truncated at ``N`` atoms.

    Closed form in terms of the digamma function; useful for choosing ``a``.
    The half-window must be at least 2: the formula is not used with
    ``m = 1``, where its first digamma term sits at the edge of its intended
    range.
    """
    a = check_positive(a, "a")
    N = check_count(N, "N", minimum=MIN_TRUNCATION)
    m = _check_window(m, N)
    if m < 2:
        raise InputError("expected_prior_kl needs m >= 2; m = 1 is not supported")
    i = np.arange(1, m + 1)
    edge = np.sum(digamma(a * (m + i - 1) / N + 1.0) - digamma((m + i - 1).astype(float)))
    middle = (N - 2 * m) / N * (digamma(2.0 * a * m / N + 1.0) - digamma(2.0 * m))
    return 2.0 / N * edge + middle + digamma(N + 1.0) - digamma(a + 1.0)


@dataclass(frozen=True, eq=False)
class DivergenceSample:
    """Monte Carlo draws of the divergence, from the prior or the posterior.

    ``windows`` holds the half-window used for each draw (the posterior
    window depends on the number of distinct atoms); ``rejected`` counts
    non-finite draws that were regenerated.
    """

    draws: np.ndarray
    kind: str
    config: dict
    windows: np.ndarray = field(default=None)
    rejected: int = 0

    def __post_init__(self):
        if self.kind not in ("prior", "posterior"):
            raise InputError(f"kind must be 'prior' or 'posterior', got {self.kind!r}")
        draws = np.array(self.draws, dtype=np.float64)
        if draws.ndim != 1 or draws.size == 0:
            raise InputError("draws must be a nonempty 1-D array")
        if not np.all(np.isfinite(draws)):
            raise InputError("divergence draws must be finite")
        draws.flags.writeable = False
        object.__setattr__(self, "draws", draws)
        object.__setattr__(self, "config", dict(self.config))

    def __len__(self):
        return self.draws.size

    def summary(self):
        q05, q50, q95 = np.quantile(self.draws, [0.05, 0.5, 0.95])
        return {
            "mean": float(self.draws.mean()),
            "median": float(q50),
            "q05": float(q05),
            "q95": float(q95),
        }


def as_measure(atoms, weights, N=None, a=math.inf):
    """Convenience constructor used in tests and examples."""
    atoms = np.asarray(atoms, dtype=np.float64)
    return DiscreteMeasure(atoms, weights, N if N is not None else atoms.size, a)
