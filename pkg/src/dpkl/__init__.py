"""Bayesian nonparametric model checking with Dirichlet process priors and a
spacing-based Kullback-Leibler divergence."""

__version__ = "0.1.0"

from .dirichlet_process import (
    DiscreteMeasure,
    PosteriorBase,
    merge_atoms,
    sample_posterior_dp,
    sample_prior_dp,
    stick_break_weights,
)
from .distributions import FittedModel, cdf, fit_mle, parse_model_spec, pdf, sample
from .divergence import (
    DivergenceSample,
    WindowConfig,
    c_weights,
    entropy_estimate,
    expected_prior_kl,
    kl_estimate,
    kl_location_normal,
    prior_kl_uniform_fastpath,
    window_size,
)
from .estimator import DPKLModelCheck
from .exceptions import (
    DegenerateBinningError,
    DPKLError,
    EstimatorError,
    FitError,
    InputError,
    NumericalError,
)
from .relative_belief import (
    CheckConfig,
    CheckFailure,
    PriorDominanceWarning,
    RBReport,
    generate_posterior_sample,
    generate_prior_sample,
    rb_analysis,
    run_check,
    simulate,
)
from .special import digamma
