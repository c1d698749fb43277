"""Relative belief model check built on prior and posterior divergence samples.

The prior sample is drawn from DP(a, F) with F the fitted model, the
posterior sample from DP(a + n, G_x).  Both are summarised against quantile
bins of the prior sample; the relative belief ratio at zero is the
posterior-to-prior content ratio of the lowest ``i0`` bins.

Every Monte Carlo draw owns a generator derived from ``(seed, kind, index)``
so results do not depend on how draws are scheduled across workers.
"""

from dataclasses import asdict, dataclass, field
import math
import warnings

import numpy as np

from ._validation import check_count, check_data, check_positive
from .dirichlet_process import PosteriorBase, merge_atoms, sample_posterior_dp
from .distributions import FittedModel, canonical_family, fit_mle
from .divergence import (
    DivergenceSample,
    kl_estimate,
    max_window,
    prior_kl_uniform_fastpath,
    window_size,
)
from .exceptions import (
    DegenerateBinningError,
    EstimatorError,
    FitError,
    InputError,
    NumericalError,
)

__all__ = [
    "CheckConfig",
    "CheckFailure",
    "PriorDominanceWarning",
    "RBReport",
    "generate_posterior_sample",
    "generate_prior_sample",
    "rb_analysis",
    "run_check",
    "simulate",
]

_STREAMS = {"prior": 0, "posterior": 1}
MAX_REJECTION_RATE = 1e-3
_MAX_ATTEMPTS = 8


class PriorDominanceWarning(UserWarning):
    """Concentration ``a`` exceeds half the sample size."""


@dataclass(frozen=True)
class CheckConfig:
    """Settings for one relative belief check at concentration ``a``."""

    a: float
    seed: int
    N: int = 200
    M: int = 20
    i0: int = 1
    r1: int = 2000
    r2: int = 2000

    def __post_init__(self):
        object.__setattr__(self, "a", check_positive(self.a, "a"))
        object.__setattr__(self, "seed", check_count(self.seed, "seed", minimum=0))
        check_count(self.N, "N", minimum=4)
        check_count(self.M, "M", minimum=2)
        check_count(self.i0, "i0")
        if not self.i0 < self.M:
            raise InputError(f"i0 must be smaller than M, got i0={self.i0}, M={self.M}")
        check_count(self.r1, "r1", minimum=self.M)
        check_count(self.r2, "r2", minimum=self.M)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class RBReport:
    """Outcome of one check.

    ``bin_edges`` has ``M + 1`` entries starting at 0 and ending at +inf.
    The lowest bin also holds any (slightly negative) divergence estimates.
    """

    d_star: float
    rb0: float
    strength: float
    bin_edges: np.ndarray
    bin_rb: np.ndarray
    prior_summary: dict
    posterior_summary: dict
    config: CheckConfig = None
    model: FittedModel = None
    rejected: dict = field(default_factory=dict)

    @property
    def M(self):
        return self.bin_rb.size

    @property
    def at_resolution_limit(self):
        """All posterior mass sits below ``d_star``; a finer grid is needed to say more."""
        return self.rb0 >= self.M

    def to_dict(self):
        out = {
            "a": self.config.a if self.config is not None else None,
            "d_star": self.d_star,
            "rb0": self.rb0,
            "strength": self.strength,
            "at_resolution_limit": self.at_resolution_limit,
            "bin_edges": [e if math.isfinite(e) else None for e in self.bin_edges.tolist()],
            "bin_rb": self.bin_rb.tolist(),
            "prior_summary": self.prior_summary,
            "posterior_summary": self.posterior_summary,
            "rejected_draws": dict(self.rejected),
        }
        if self.config is not None:
            out["config"] = self.config.to_dict()
        if self.model is not None:
            out["model"] = {"family": self.model.family, "params": list(self.model.params)}
        return out


@dataclass(frozen=True)
class CheckFailure:
    """A grid entry whose check could not be completed."""

    config: CheckConfig
    error: str

    def to_dict(self):
        return {"a": self.config.a, "config": self.config.to_dict(), "error": self.error}


def _draw_rng(seed, kind, index, attempt):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(_STREAMS[kind], index, attempt))
    return np.random.Generator(np.random.PCG64(ss))


def _draw_range(draw_one, seed, kind, start, stop):
    values = np.empty(stop - start)
    windows = np.empty(stop - start, dtype=np.int64)
    rejected = 0
    for j in range(start, stop):
        for attempt in range(_MAX_ATTEMPTS):
            try:
                value, m = draw_one(_draw_rng(seed, kind, j, attempt))
            except EstimatorError as exc:
                raise EstimatorError(f"{kind} draw {j}: {exc}") from exc
            if math.isfinite(value):
                break
            rejected += 1
        else:
            raise NumericalError(f"{kind} draw {j} stayed non-finite after {_MAX_ATTEMPTS} attempts")
        values[j - start] = value
        windows[j - start] = m
    return values, windows, rejected


def _collect(draw_one, seed, kind, r, n_jobs):
    if n_jobs in (None, 1) or r < 2:
        values, windows, rejected = _draw_range(draw_one, seed, kind, 0, r)
    else:
        from joblib import Parallel, delayed, effective_n_jobs

        workers = effective_n_jobs(n_jobs)
        bounds = np.linspace(0, r, min(r, 4 * workers) + 1).astype(int)
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_draw_range)(draw_one, seed, kind, lo, hi)
            for lo, hi in zip(bounds[:-1], bounds[1:])
        )
        values = np.concatenate([p[0] for p in parts])
        windows = np.concatenate([p[1] for p in parts])
        rejected = sum(p[2] for p in parts)
    if rejected > MAX_REJECTION_RATE * r:
        raise NumericalError(f"{rejected} of {r} {kind} draws were non-finite")
    return values, windows, rejected


class _PriorDraw:
    # Module-level callables keep the draw functions picklable for joblib.
    def __init__(self, a, N, m):
        self.a, self.N, self.m = a, N, m

    def __call__(self, rng):
        return prior_kl_uniform_fastpath(self.a, self.N, self.m, rng), self.m


class _PosteriorDraw:
    def __init__(self, base, model, N):
        self.base, self.model, self.N = base, model, N

    def __call__(self, rng):
        measure = merge_atoms(sample_posterior_dp(self.base, self.N, rng))
        distinct = len(measure)
        if distinct < 3:
            raise EstimatorError(f"only {distinct} distinct atoms; the estimator needs 3")
        m = max(1, min(math.floor(math.sqrt(distinct) + 0.5), max_window(distinct)))
        return kl_estimate(measure, self.model, m), m


def generate_prior_sample(cfg, n_jobs=None):
    """``r1`` draws of the prior divergence via the uniform fast path."""
    m = window_size(cfg.N)
    values, windows, rejected = _collect(_PriorDraw(cfg.a, cfg.N, m), cfg.seed, "prior", cfg.r1, n_jobs)
    config = {"a": cfg.a, "N": cfg.N, "m": m, "r": cfg.r1, "seed": cfg.seed}
    return DivergenceSample(values, "prior", config, windows=windows, rejected=rejected)


def generate_posterior_sample(cfg, data, model, n_jobs=None):
    """``r2`` draws of the posterior divergence to ``model``.

    Each draw merges tied atoms and picks the window from the number of
    distinct atoms.
    """
    base = PosteriorBase(model, check_data(data), cfg.a)
    values, windows, rejected = _collect(
        _PosteriorDraw(base, model, cfg.N), cfg.seed, "posterior", cfg.r2, n_jobs
    )
    config = {"a": cfg.a, "N": cfg.N, "m": None, "r": cfg.r2, "seed": cfg.seed}
    return DivergenceSample(values, "posterior", config, windows=windows, rejected=rejected)


def prior_quantile_edges(prior_draws, M):
    """Bin edges ``0, d_(1/M), ..., d_((M-1)/M), +inf``.

    ``d_(i/M)`` is the order statistic at rank ``ceil(r * i / M)``.
    """
    d = np.sort(np.asarray(prior_draws, dtype=np.float64))
    r = d.size
    if d[0] == d[-1]:
        raise DegenerateBinningError("all prior draws are equal; quantile bins are degenerate")
    ranks = [math.ceil(r * i / M) for i in range(1, M)]
    return np.concatenate([[0.0], d[np.array(ranks) - 1], [math.inf]])


def rb_analysis(prior, posterior, M, i0, config=None, model=None):
    """Relative belief ratio at zero and its strength from two samples.

    Bin contents are differences of the posterior empirical cdf at the
    prior quantile edges, so the lowest bin is ``(-inf, d_(1/M)]`` and the
    last is ``(d_((M-1)/M), +inf)``.  The strength adds the posterior content
    of bins ``i0..M`` (numbered from 1) whose ratio does not exceed ``rb0``.
    """
    M = check_count(M, "M", minimum=2)
    i0 = check_count(i0, "i0")
    if i0 >= M:
        raise InputError(f"i0 must be smaller than M, got i0={i0}, M={M}")
    prior_draws = prior.draws if isinstance(prior, DivergenceSample) else np.asarray(prior, float)
    post_draws = (
        posterior.draws if isinstance(posterior, DivergenceSample) else np.asarray(posterior, float)
    )
    if prior_draws.size < M:
        raise InputError(f"need at least M={M} prior draws, got {prior_draws.size}")
    if post_draws.size < 1:
        raise InputError("need at least one posterior draw")

    edges = prior_quantile_edges(prior_draws, M)
    post = np.sort(post_draws)
    r2 = post.size
    below = np.searchsorted(post, edges[1:M], side="right")
    counts = np.diff(np.concatenate([[0], below, [r2]]))
    bin_rb = M * counts / r2

    d_star = float(edges[i0])
    count0 = int(below[i0 - 1])
    rb0 = M * count0 / r2
    # Bin k (0-based) covers (edges[k], edges[k+1]]; compare integer counts
    # so that the rb0 bin itself is included exactly.
    eligible = (np.arange(M) >= i0 - 1) & (counts <= count0)
    strength = float(counts[eligible].sum() / r2)

    def summary(s):
        if isinstance(s, DivergenceSample):
            return s.summary()
        return DivergenceSample(s, "prior", {}).summary()

    rejected = {}
    for name, s in (("prior", prior), ("posterior", posterior)):
        if isinstance(s, DivergenceSample):
            rejected[name] = s.rejected
    return RBReport(
        d_star=d_star,
        rb0=rb0,
        strength=strength,
        bin_edges=edges,
        bin_rb=bin_rb,
        prior_summary=summary(prior),
        posterior_summary=summary(posterior),
        config=config,
        model=model,
        rejected=rejected,
    )


def check_one(cfg, data, model, n_jobs=None):
    """Full check for a single configuration and an already fitted model."""
    prior = generate_prior_sample(cfg, n_jobs=n_jobs)
    posterior = generate_posterior_sample(cfg, data, model, n_jobs=n_jobs)
    return rb_analysis(prior, posterior, cfg.M, cfg.i0, config=cfg, model=model)


def run_check(data, family, configs, n_jobs=None):
    """Fit ``family`` once and run one check per configuration.

    Returns one entry per configuration, in order: an :class:`RBReport`, or
    a :class:`CheckFailure` when that entry hit an estimator or numerical
    error.  Fitting errors propagate.
    """
    x = check_data(data, min_length=2)
    family = canonical_family(family)
    if not configs:
        raise InputError("at least one configuration is required")
    model = fit_mle(family, x)
    out = []
    for cfg in configs:
        if cfg.a > 0.5 * x.size:
            warnings.warn(
                f"a={cfg.a:g} exceeds half the sample size (n={x.size}); "
                "the prior may dominate the data",
                PriorDominanceWarning,
                stacklevel=2,
            )
        try:
            out.append(check_one(cfg, x, model, n_jobs=n_jobs))
        except (EstimatorError, NumericalError, DegenerateBinningError) as exc:
            out.append(CheckFailure(cfg, str(exc)))
    return out


def _replication(truth, family, n, rep, a_grid, seed, cfg_kwargs):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(2, rep))
    data_ss, check_ss = ss.spawn(2)
    x = truth.sample(n, np.random.Generator(np.random.PCG64(data_ss)))
    check_seed = int(check_ss.generate_state(1, dtype=np.uint64)[0])
    configs = [CheckConfig(a, seed=check_seed, **cfg_kwargs) for a in a_grid]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PriorDominanceWarning)
        try:
            return run_check(x, family, configs)
        except FitError as exc:
            return [CheckFailure(cfg, str(exc)) for cfg in configs]


def simulate(truth, family, n, replications, a_grid, seed, n_jobs=None, **cfg_kwargs):
    """Repeat the check on fresh samples of size ``n`` drawn from ``truth``.

    Returns ``{"replications": [[entry per a] per replication],
    "aggregate": [summary per a]}``.  Replication ``k`` depends only on
    ``(seed, k)``, so results are identical for any ``n_jobs``.
    """
    n = check_count(n, "n", minimum=2)
    replications = check_count(replications, "replications")
    a_grid = [check_positive(a, "a") for a in a_grid]
    if not a_grid:
        raise InputError("a_grid must not be empty")
    family = canonical_family(family)
    args = (truth, family, n)
    if n_jobs in (None, 1):
        runs = [_replication(*args, k, a_grid, seed, cfg_kwargs) for k in range(replications)]
    else:
        from joblib import Parallel, delayed

        runs = Parallel(n_jobs=n_jobs)(
            delayed(_replication)(*args, k, a_grid, seed, cfg_kwargs) for k in range(replications)
        )

    aggregate = []
    for j, a in enumerate(a_grid):
        ok = [run[j] for run in runs if isinstance(run[j], RBReport)]
        rb = np.array([r.rb0 for r in ok])
        st = np.array([r.strength for r in ok])
        aggregate.append({
            "a": a,
            "completed": len(ok),
            "failed": replications - len(ok),
            "median_rb0": float(np.median(rb)) if ok else None,
            "median_strength": float(np.median(st)) if ok else None,
            "mean_rb0": float(rb.mean()) if ok else None,
            "fraction_rb0_above_1": float(np.mean(rb > 1)) if ok else None,
        })
    return {"replications": runs, "aggregate": aggregate}
