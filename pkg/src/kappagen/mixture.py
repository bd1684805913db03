"""Three-component model for net wealth on the whole real line.

Mass ``theta_neg`` sits on negative values, with ``|x|`` Weibull
distributed; mass ``theta_zero`` is an atom at zero; mass ``theta_pos``
follows a kappa-generalized law on x > 0.

The log-likelihood splits over the sign strata into a multinomial term
for the component counts plus one term per branch, so the plug-in
proportions together with per-branch maximum likelihood give the joint
maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import WeightedSample
from .distributions import KappaGeneralized, Weibull
from .fitting import FitConfig, FitResult, fit_mle
from .kappa_math import DomainError
from .rng import make_rng, spawn_rngs

__all__ = [
    "NetWealthMixture",
    "NetWealthMixtureParams",
    "mixture_cdf",
    "mixture_log_likelihood",
    "fit_mixture",
    "sample_mixture",
    "zero_tolerance",
    "ZERO_RELATIVE_TOLERANCE",
]

#: Values with |x| below this fraction of median |x| count as exact zeros.
ZERO_RELATIVE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class NetWealthMixture:
    theta_neg: float
    theta_zero: float
    theta_pos: float
    neg: Weibull | None
    pos: KappaGeneralized

    def __post_init__(self):
        thetas = (self.theta_neg, self.theta_zero, self.theta_pos)
        if any(not (t >= 0) for t in thetas) or abs(sum(thetas) - 1.0) > 1e-12:
            raise DomainError(f"component weights must be >= 0 and sum to 1, got {thetas}")
        if self.theta_neg > 0 and self.neg is None:
            raise DomainError("a negative branch is required when theta_neg > 0")
        if not isinstance(self.pos, KappaGeneralized):
            raise DomainError("the positive branch must be kappa-generalized")

    @property
    def n_params(self) -> int:
        free = sum(t > 0 for t in (self.theta_neg, self.theta_zero, self.theta_pos)) - 1
        neg = self.neg.n_params if self.theta_neg > 0 else 0
        return free + neg + self.pos.n_params

    def cdf(self, x):
        """Right-continuous CDF; jumps by ``theta_zero`` at x = 0."""
        scalar = np.ndim(x) == 0
        x = np.asarray(x, dtype=float)
        if np.any(np.isnan(x)):
            raise DomainError("mixture_cdf needs non-NaN arguments")
        out = np.empty_like(x)
        neg = x < 0
        if self.theta_neg > 0:
            out[neg] = self.theta_neg * self.neg.ccdf(-x[neg])
        else:
            out[neg] = 0.0
        pos = ~neg
        out[pos] = self.theta_neg + self.theta_zero + self.theta_pos * self.pos.cdf(x[pos])
        return float(out) if scalar else out

    def continuous_pdf(self, x):
        """Density of the absolutely continuous part (zero at x = 0)."""
        scalar = np.ndim(x) == 0
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        neg, pos = x < 0, x > 0
        if self.theta_neg > 0:
            out[neg] = self.theta_neg * self.neg.pdf(-x[neg])
        out[pos] = self.theta_pos * self.pos.pdf(x[pos])
        return float(out) if scalar else out

    def sample(self, n: int, seed=None) -> np.ndarray:
        return sample_mixture(n, self, seed)


NetWealthMixtureParams = NetWealthMixture


def mixture_cdf(x, m: NetWealthMixture):
    return m.cdf(x)


def zero_tolerance(values, relative: float = ZERO_RELATIVE_TOLERANCE) -> float:
    """Absolute threshold below which a value counts as an exact zero."""
    return relative * float(np.median(np.abs(values)))


def _split(data, tol):
    zero = np.abs(data.values) <= tol
    neg = (data.values < 0) & ~zero
    pos = (data.values > 0) & ~zero
    return neg, zero, pos


def mixture_log_likelihood(data: WeightedSample, m: NetWealthMixture, tol: float | None = None) -> float:
    """Joint weighted log-likelihood: the atom contributes ``log theta_zero``."""
    tol = zero_tolerance(data.values) if tol is None else tol
    neg, zero, pos = _split(data, tol)
    w, v = data.weights, data.values
    ll = 0.0
    for mask, theta in ((neg, m.theta_neg), (zero, m.theta_zero), (pos, m.theta_pos)):
        if np.any(mask):
            if theta == 0:
                return -math.inf
            ll += w[mask].sum() * math.log(theta)
    if np.any(neg):
        ll += float(np.dot(w[neg], m.neg.logpdf(-v[neg])))
    if np.any(pos):
        ll += float(np.dot(w[pos], m.pos.logpdf(v[pos])))
    return ll


def fit_mixture(
    data: WeightedSample, config: FitConfig | None = None, zero_tol: float | None = None
) -> FitResult:
    """Fit the net-wealth mixture to signed microdata.

    Component weights are the weighted shares of negative, zero and
    positive records; each continuous branch is fitted by weighted maximum
    likelihood on its own stratum. ``zero_tol`` defaults to
    ``zero_tolerance(values)``.

    Raises
    ------
    DomainError
        If no record is positive.
    """
    config = config or FitConfig()
    tol = zero_tolerance(data.values) if zero_tol is None else zero_tol
    neg, zero, pos = _split(data, tol)
    w = data.weights
    total = w.sum()
    if not np.any(pos & (w > 0)):
        raise DomainError("the positive stratum is empty; the kappa-generalized branch is mandatory")
    theta_neg = float(w[neg].sum() / total)
    theta_zero = float(w[zero].sum() / total)
    theta_pos = 1.0 - theta_neg - theta_zero

    pos_fit = fit_mle(data.subset(pos), "kgen", config)
    neg_fit = None
    if theta_neg > 0:
        neg_sample = WeightedSample(-data.values[neg], w[neg])
        neg_fit = fit_mle(neg_sample, "weibull", config)
    m = NetWealthMixture(
        theta_neg, theta_zero, theta_pos, neg_fit.params if neg_fit else None, pos_fit.params
    )
    stderr = None
    if pos_fit.stderr is not None:
        stderr = {f"pos.{k}": v for k, v in pos_fit.stderr.items()}
        if neg_fit is not None:
            stderr.update({f"neg.{k}": v for k, v in neg_fit.stderr.items()})
    converged = pos_fit.converged and (neg_fit is None or neg_fit.converged)
    return FitResult(
        model="mixture",
        params=m,
        loglik=mixture_log_likelihood(data, m, tol),
        k=m.n_params,
        n_eff=data.n_eff,
        converged=converged,
        iterations=pos_fit.iterations + (neg_fit.iterations if neg_fit else 0),
        stderr=stderr,
        trace=pos_fit.trace + (neg_fit.trace if neg_fit else []),
    )


def sample_mixture(n: int, m: NetWealthMixture, seed=None) -> np.ndarray:
    """Draw ``n`` signed net-wealth values.

    One uniform per record (from the seed's own stream) drives the value
    by inverse transform within its branch; the component labels come
    from a spawned child stream. With ``theta_pos = 1`` the output equals
    ``m.pos.sample(n, seed)``.
    """
    if n < 0:
        raise ValueError("sample size must be nonnegative")
    rng = make_rng(seed)
    u = rng.random(n)
    if isinstance(seed, np.random.Generator):
        (labels_rng,) = rng.spawn(1)
    else:
        (labels_rng,) = spawn_rngs(seed, 1)
    c = labels_rng.random(n)
    neg = c < m.theta_neg
    zero = ~neg & (c < m.theta_neg + m.theta_zero)
    pos = ~(neg | zero)
    out = np.zeros(n)
    if np.any(neg):
        out[neg] = -m.neg.quantile(u[neg])
    out[pos] = m.pos.quantile(u[pos])
    return out
