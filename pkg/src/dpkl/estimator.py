"""Scikit-learn style front end for the relative belief model check."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_data
from .distributions import canonical_family, fit_mle
from .relative_belief import (
    CheckConfig,
    generate_posterior_sample,
    generate_prior_sample,
    rb_analysis,
)


class DPKLModelCheck(BaseEstimator):
    """Check a parametric family against data with a Dirichlet process prior.

    Parameters
    ----------
    family : str, default="normal"
        Model family to check; one of ``normal-location-unit-variance``,
        ``normal`` or ``gumbel``.
    a : float, default=1.0
        Concentration of the Dirichlet process prior.
    N : int, default=200
        Stick-breaking truncation level.
    M : int, default=20
        Number of prior quantile bins.
    i0 : int, default=1
        The relative belief ratio at zero uses the lowest ``i0`` bins.
    r1, r2 : int, default=2000
        Prior and posterior Monte Carlo sample sizes.
    random_state : int or None
        Master seed.  ``None`` draws fresh entropy; the seed actually used is
        stored in ``seed_``.
    n_jobs : int or None
        Workers for draw generation.  Results do not depend on it.

    Attributes
    ----------
    model_ : FittedModel
        Maximum likelihood fit used as the prior base and reference model.
    prior_sample_, posterior_sample_ : DivergenceSample
    report_ : RBReport
    rb0_ : float
        Relative belief ratio at zero; above 1 is evidence for the model.
    strength_ : float
    d_star_ : float

    Examples
    --------
    >>> import numpy as np
    >>> x = np.random.default_rng(0).normal(size=20)
    >>> check = DPKLModelCheck("normal-location-unit-variance", a=1, random_state=0,
    ...                        r1=400, r2=400).fit(x)
    >>> check.rb0_ > 1
    True
    """

    def __init__(self, family="normal", a=1.0, N=200, M=20, i0=1, r1=2000, r2=2000,
                 random_state=None, n_jobs=None):
        self.family = family
        self.a = a
        self.N = N
        self.M = M
        self.i0 = i0
        self.r1 = r1
        self.r2 = r2
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _resolve_seed(self):
        if self.random_state is None:
            return int(np.random.SeedSequence().entropy % (2**63))
        if isinstance(self.random_state, np.random.Generator):
            return int(self.random_state.integers(0, 2**63))
        return int(self.random_state)

    def fit(self, X, y=None):
        x = check_data(X, min_length=2, name="X")
        family = canonical_family(self.family)
        self.seed_ = self._resolve_seed()
        self.config_ = CheckConfig(self.a, seed=self.seed_, N=self.N, M=self.M, i0=self.i0,
                                   r1=self.r1, r2=self.r2)
        self.model_ = fit_mle(family, x)
        self.prior_sample_ = generate_prior_sample(self.config_, n_jobs=self.n_jobs)
        self.posterior_sample_ = generate_posterior_sample(self.config_, x, self.model_,
                                                           n_jobs=self.n_jobs)
        self.report_ = rb_analysis(self.prior_sample_, self.posterior_sample_, self.M, self.i0,
                                   config=self.config_, model=self.model_)
        self.rb0_ = self.report_.rb0
        self.strength_ = self.report_.strength
        self.d_star_ = self.report_.d_star
        self.n_features_in_ = 1
        self.n_samples_fit_ = x.size
        return self

    def to_dict(self):
        check_is_fitted(self, "report_")
        return self.report_.to_dict()
