"""Truncated stick-breaking simulation of Dirichlet process realisations."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_count, check_data, check_positive, check_rng
from .distributions import FittedModel
from .exceptions import InputError

__all__ = [
    "DiscreteMeasure",
    "PosteriorBase",
    "merge_atoms",
    "sample_posterior_dp",
    "sample_prior_dp",
    "stick_break_weights",
]

MIN_TRUNCATION = 4


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite weighted atom set ``sum_i weights[i] * delta(atoms[i])``.

    Atoms are sorted ascending and each weight stays attached to the atom it
    was generated with.  Arrays are made read-only on construction.
    """

    atoms: np.ndarray
    weights: np.ndarray
    truncation: int
    concentration: float

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=np.float64)
        weights = np.array(self.weights, dtype=np.float64)
        if atoms.ndim != 1 or atoms.shape != weights.shape:
            raise InputError("atoms and weights must be 1-D arrays of equal length")
        if atoms.size == 0:
            raise InputError("a discrete measure needs at least one atom")
        if np.any(np.diff(atoms) < 0):
            raise InputError("atoms must be sorted in nondecreasing order")
        if np.any(weights < 0):
            raise InputError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InputError(f"weights must sum to 1, got {weights.sum()!r}")
        atoms.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.atoms.size

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            self.truncation == other.truncation
            and self.concentration == other.concentration
            and np.array_equal(self.atoms, other.atoms)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    @property
    def is_merged(self):
        return bool(np.all(np.diff(self.atoms) > 0))

    def cdf(self, t):
        """Mass of ``(-inf, t]``."""
        k = np.searchsorted(self.atoms, t, side="right")
        return float(self.weights[:k].sum())

    def mean(self):
        return float(np.dot(self.weights, self.atoms))


@dataclass(frozen=True, eq=False)
class PosteriorBase:
    """Posterior base ``a/(a+n) G + n/(a+n) F_n`` for a DP(a, G) prior."""

    prior_model: FittedModel
    data: np.ndarray
    prior_mass: float

    def __post_init__(self):
        data = check_data(self.data).copy()
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "prior_mass", check_positive(self.prior_mass, "a"))

    @property
    def data_mass(self):
        return self.data.size

    @property
    def mixing_weights(self):
        total = self.prior_mass + self.data_mass
        return self.prior_mass / total, self.data_mass / total

    def cdf(self, t):
        w_prior, w_data = self.mixing_weights
        empirical = np.count_nonzero(self.data <= t) / self.data_mass
        return w_prior * float(self.prior_model.cdf(t)) + w_data * empirical


def stick_break_weights(a, N, rng):
    """Stick-breaking weights truncated at ``N`` terms.

    The fractions are Beta(1, a) except the last, which is fixed at one so
    the weights sum to one.
    """
    a = check_positive(a, "a")
    N = check_count(N, "N")
    rng = check_rng(rng)
    fractions = rng.beta(1.0, a, size=N)
    fractions[-1] = 1.0
    remaining = np.empty(N)
    remaining[0] = 1.0
    np.cumprod(1.0 - fractions[:-1], out=remaining[1:])
    return fractions * remaining


def _sorted_measure(atoms, weights, N, a):
    order = np.argsort(atoms, kind="stable")
    return DiscreteMeasure(atoms[order], weights[order], N, a)


def sample_prior_dp(a, base, N, rng):
    """One truncated draw from DP(a, base)."""
    a = check_positive(a, "a")
    N = check_count(N, "N", minimum=MIN_TRUNCATION)
    rng = check_rng(rng)
    weights = stick_break_weights(a, N, rng)
    atoms = base.sample(N, rng)
    return _sorted_measure(atoms, weights, N, a)


def sample_posterior_dp(pb, N, rng):
    """One truncated draw from the posterior DP(a + n, G_x)."""
    if not isinstance(pb, PosteriorBase):
        raise InputError("pb must be a PosteriorBase")
    N = check_count(N, "N", minimum=MIN_TRUNCATION)
    rng = check_rng(rng)
    a, n = pb.prior_mass, pb.data_mass
    weights = stick_break_weights(a + n, N, rng)
    from_base = rng.random(N) < a / (a + n)
    atoms = pb.data[rng.integers(0, n, size=N)]
    k = int(from_base.sum())
    if k:
        atoms[from_base] = pb.prior_model.sample(k, rng)
    return _sorted_measure(atoms, weights, N, a + n)


def merge_atoms(measure):
    """Collapse exactly equal atoms by adding their weights."""
    atoms = measure.atoms
    if atoms.size < 2 or np.all(np.diff(atoms) > 0):
        return measure
    starts = np.flatnonzero(np.r_[True, atoms[1:] != atoms[:-1]])
    return DiscreteMeasure(
        atoms[starts],
        np.add.reduceat(measure.weights, starts),
        measure.truncation,
        measure.concentration,
    )
