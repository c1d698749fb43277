"""Parametric families used as hypothesised models and as data generators.

Parameters are stored in a flat tuple whose meaning depends on the family:

========================================  ===================================
family                                    params
========================================  ===================================
``normal-location-unit-variance``         ``(mu,)``
``normal``                                ``(mu, variance)``
``gumbel``                                ``(location, scale)``
``student-t``                             ``(df, location, scale)``
``cauchy``                                ``(location, scale)``
``normal-mixture-2``                      ``(w, mu1, var1, mu2, var2)``
``uniform``                               ``(lower, upper)``
========================================  ===================================

Variances are in squared data units, every other scale is in data units.
Only the first three families can be fitted by maximum likelihood; the others
exist to generate data for simulation studies (and, for ``uniform``, as a
reference density with known entropy).
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize, special

from ._validation import check_count, check_data, check_finite_scalar, check_rng
from .exceptions import FitError, InputError

__all__ = [
    "FAMILIES",
    "FITTABLE_FAMILIES",
    "FittedModel",
    "cdf",
    "fit_mle",
    "parse_model_spec",
    "pdf",
    "sample",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

FAMILIES = {
    "normal-location-unit-variance": 1,
    "normal": 2,
    "gumbel": 2,
    "student-t": 3,
    "cauchy": 2,
    "normal-mixture-2": 5,
    "uniform": 2,
}
FITTABLE_FAMILIES = ("normal-location-unit-variance", "normal", "gumbel")

# Short names accepted on the command line.
ALIASES = {
    "normal-location": "normal-location-unit-variance",
    "location-normal": "normal-location-unit-variance",
    "t": "student-t",
    "mixture": "normal-mixture-2",
}


def canonical_family(name):
    family = ALIASES.get(name, name)
    if family not in FAMILIES:
        known = ", ".join(sorted(FAMILIES))
        raise InputError(f"unknown family {name!r}; expected one of: {known}")
    return family


@dataclass(frozen=True)
class FittedModel:
    """A member of one of the supported parametric families."""

    family: str
    params: tuple

    def __post_init__(self):
        family = canonical_family(self.family)
        params = tuple(float(p) for p in self.params)
        if len(params) != FAMILIES[family]:
            raise InputError(
                f"{family} takes {FAMILIES[family]} parameter(s), got {len(params)}"
            )
        if not all(math.isfinite(p) for p in params):
            raise InputError(f"parameters must be finite, got {params}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", params)
        self._check_params()

    def _check_params(self):
        f, p = self.family, self.params
        positive = {
            "normal": (1,),
            "gumbel": (1,),
            "student-t": (0, 2),
            "cauchy": (1,),
            "normal-mixture-2": (2, 4),
        }.get(f, ())
        for idx in positive:
            if p[idx] <= 0:
                raise InputError(f"{f}: scale/variance parameters must be positive, got {p}")
        if f == "normal-mixture-2" and not 0.0 < p[0] < 1.0:
            raise InputError(f"mixture weight must lie in (0, 1), got {p[0]}")
        if f == "uniform" and not p[0] < p[1]:
            raise InputError(f"uniform needs lower < upper, got {p}")

    def __str__(self):
        args = ", ".join(f"{v:.6g}" for v in self.params)
        return f"{self.family}({args})"

    # Location-scale view used by normal, gumbel, student-t and cauchy.
    def _loc_scale(self):
        f, p = self.family, self.params
        if f == "normal-location-unit-variance":
            return p[0], 1.0
        if f == "normal":
            return p[0], math.sqrt(p[1])
        if f in ("gumbel", "cauchy"):
            return p[0], p[1]
        if f == "student-t":
            return p[1], p[2]
        raise AssertionError(f)  # pragma: no cover

    def _mixture_parts(self):
        w, mu1, v1, mu2, v2 = self.params
        return (w, mu1, math.sqrt(v1)), (1.0 - w, mu2, math.sqrt(v2))

    def logpdf(self, y):
        y = np.asarray(y, dtype=np.float64)
        f = self.family
        if f == "uniform":
            lo, hi = self.params
            inside = (y >= lo) & (y <= hi)
            return np.where(inside, -math.log(hi - lo), -np.inf)
        if f == "normal-mixture-2":
            comps = []
            for w, mu, sd in self._mixture_parts():
                z = (y - mu) / sd
                comps.append(math.log(w) - math.log(sd) - _LOG_SQRT_2PI - 0.5 * z * z)
            return np.logaddexp(comps[0], comps[1])
        loc, scale = self._loc_scale()
        z = (y - loc) / scale
        if f in ("normal", "normal-location-unit-variance"):
            out = -_LOG_SQRT_2PI - 0.5 * z * z
        elif f == "gumbel":
            out = -z - np.exp(-z)
        elif f == "cauchy":
            out = -math.log(math.pi) - np.log1p(z * z)
        else:
            nu = self.params[0]
            out = (
                special.gammaln((nu + 1) / 2)
                - special.gammaln(nu / 2)
                - 0.5 * math.log(nu * math.pi)
                - (nu + 1) / 2 * np.log1p(z * z / nu)
            )
        return out - math.log(scale)

    def pdf(self, y):
        return np.exp(self.logpdf(y))

    def cdf(self, y):
        y = np.asarray(y, dtype=np.float64)
        f = self.family
        if f == "uniform":
            lo, hi = self.params
            return np.clip((y - lo) / (hi - lo), 0.0, 1.0)
        if f == "normal-mixture-2":
            return sum(w * special.ndtr((y - mu) / sd) for w, mu, sd in self._mixture_parts())
        loc, scale = self._loc_scale()
        z = (y - loc) / scale
        if f in ("normal", "normal-location-unit-variance"):
            return special.ndtr(z)
        if f == "gumbel":
            with np.errstate(over="ignore"):  # exp(-z) -> inf gives the correct limit 0
                return np.exp(-np.exp(-z))
        if f == "cauchy":
            return 0.5 + np.arctan(z) / math.pi
        return special.stdtr(self.params[0], z)

    def quantile(self, q):
        q = np.asarray(q, dtype=np.float64)
        if np.any((q < 0) | (q > 1)):
            raise InputError("quantile levels must lie in [0, 1]")
        f = self.family
        if f == "uniform":
            lo, hi = self.params
            return lo + q * (hi - lo)
        if f == "normal-mixture-2":
            return np.vectorize(self._mixture_quantile, otypes=[float])(q)
        loc, scale = self._loc_scale()
        if f in ("normal", "normal-location-unit-variance"):
            z = special.ndtri(q)
        elif f == "gumbel":
            z = -np.log(-np.log(q))
        elif f == "cauchy":
            z = np.tan(math.pi * (q - 0.5))
        else:
            z = special.stdtrit(self.params[0], q)
        return loc + scale * z

    def _mixture_quantile(self, q):
        if q == 0.0:
            return -math.inf
        if q == 1.0:
            return math.inf
        parts = self._mixture_parts()
        lo = min(mu - 40 * sd for _, mu, sd in parts)
        hi = max(mu + 40 * sd for _, mu, sd in parts)
        return optimize.brentq(lambda y: float(self.cdf(y)) - q, lo, hi, xtol=1e-13, rtol=1e-15)

    def sample(self, n, rng):
        n = check_count(n, "n")
        rng = check_rng(rng)
        f = self.family
        if f == "uniform":
            return rng.uniform(self.params[0], self.params[1], size=n)
        if f == "normal-mixture-2":
            (w, mu1, sd1), (_, mu2, sd2) = self._mixture_parts()
            first = rng.random(n) < w
            z = rng.standard_normal(n)
            return np.where(first, mu1 + sd1 * z, mu2 + sd2 * z)
        loc, scale = self._loc_scale()
        if f in ("normal", "normal-location-unit-variance"):
            z = rng.standard_normal(n)
        elif f == "gumbel":
            z = rng.gumbel(size=n)
        elif f == "cauchy":
            z = rng.standard_cauchy(n)
        else:
            z = rng.standard_t(self.params[0], size=n)
        return loc + scale * z


def pdf(model, y):
    """Density of ``model`` at the finite point ``y``."""
    return float(model.pdf(check_finite_scalar(y)))


def cdf(model, y):
    """Distribution function of ``model`` at the finite point ``y``."""
    return float(model.cdf(check_finite_scalar(y)))


def sample(model, n, rng):
    """Draw ``n`` i.i.d. values from ``model``; deterministic given ``rng``."""
    return model.sample(n, rng)


def parse_model_spec(spec):
    """Parse ``"family:p1,p2,..."`` into a :class:`FittedModel`.

    ``student-t`` may be given with the degrees of freedom only
    (``"t:3"`` means location 0 and scale 1).
    """
    name, _, rest = spec.partition(":")
    family = canonical_family(name.strip())
    try:
        params = [float(tok) for tok in rest.split(",") if tok.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse parameters in model spec {spec!r}") from exc
    if family == "student-t" and len(params) == 1:
        params += [0.0, 1.0]
    return FittedModel(family, tuple(params))


def _gumbel_profile(beta, z):
    # g(beta) = beta - mean(z) + weighted mean of z with weights exp(-z/beta);
    # its root is the scale MLE.  Returns g and dg/dbeta.
    t = -z / beta
    w = np.exp(t - t.max())
    w /= w.sum()
    wmean = np.dot(w, z)
    wvar = np.dot(w, (z - wmean) ** 2)
    return beta - z.mean() + wmean, 1.0 + wvar / beta**2


def _fit_gumbel(x, tol=1e-12, max_iter=200):
    center = x.mean()
    z = x - center
    sd = z.std()
    if sd == 0:
        raise FitError("gumbel fit needs data that are not all equal", iterations=0)

    # g < 0 as beta -> 0 and g ~ beta for large beta, so a bracket always exists.
    lo, hi = sd * 1e-3, sd
    while _gumbel_profile(lo, z)[0] >= 0:
        lo /= 10.0
    while _gumbel_profile(hi, z)[0] <= 0:
        hi *= 2.0

    beta = min(max(sd * math.sqrt(6.0) / math.pi, lo), hi)
    for it in range(1, max_iter + 1):
        g, dg = _gumbel_profile(beta, z)
        if abs(g) <= tol * sd:
            break
        if g < 0:
            lo = beta
        else:
            hi = beta
        step = beta - g / dg
        beta = step if lo < step < hi else 0.5 * (lo + hi)
    else:
        raise FitError(f"gumbel scale solve did not converge after {max_iter} iterations",
                       iterations=max_iter)

    log_mean = special.logsumexp(-z / beta) - math.log(len(z))
    return center - beta * log_mean, beta


def fit_mle(family, data):
    """Maximum likelihood fit of ``family`` to ``data``.

    Normal variance uses the divisor ``n``.  The gumbel fit solves the profile
    likelihood equation for the scale by safeguarded Newton iteration and
    then sets the location in closed form.
    """
    family = canonical_family(family)
    x = check_data(data, min_length=2)
    if family == "normal-location-unit-variance":
        return FittedModel(family, (x.mean(),))
    if family == "normal":
        mu = x.mean()
        var = np.mean((x - mu) ** 2)
        if var == 0:
            raise FitError("normal fit needs data with nonzero variance", iterations=0)
        return FittedModel(family, (mu, var))
    if family == "gumbel":
        return FittedModel(family, _fit_gumbel(x))
    raise InputError(f"no maximum likelihood fit is provided for {family!r}; "
                     f"fittable families: {', '.join(FITTABLE_FAMILIES)}")
