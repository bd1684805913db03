"""Moments, Lorenz curve, Gini index and income shares.

Parametric quantities are integrals over the quantile function,

    E[X**r] = int_0^1 Q(u)**r du,     L(u) = (1/mu) int_0^u Q(t) dt,
    G = 1 - 2 int_0^1 L(u) du = 1 - (2/mu) int_0^1 (1 - t) Q(t) dt,

evaluated with adaptive Gauss-Kronrod quadrature (QUADPACK via scipy).
A Pareto-type quantile grows like (1 - t)**(-g) near t = 1, with g the
distribution's ``tail_index``. On the upper half of the unit interval the
integrals are rewritten in s = (1 - t)**c, c = 1 - r*g, which turns that
singularity into a bounded integrand and keeps the top-income digits.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .data import WeightedSample
from .distributions import SizeDistribution
from .kappa_math import DomainError

__all__ = [
    "moment",
    "mean",
    "lorenz",
    "gini",
    "percentile_share",
    "sample_gini",
    "sample_lorenz",
]

_SPLIT = 0.5
_QUAD = dict(epsabs=0.0, epsrel=1e-11, limit=400)


def _quad(f, a, b):
    value, _ = integrate.quad(f, a, b, **_QUAD)
    return value


def _upper(dist: SizeDistribution, phi, growth: float, u0: float) -> float:
    """``int_{u0}^1 phi(Q(t), 1-t) dt`` where phi grows like (1-t)**(-growth)."""
    c = 1.0 - max(growth, 0.0)
    if c <= 0:
        raise DomainError("integral diverges at the upper tail")

    def integrand(s):
        q = s ** (1.0 / c)
        if q <= 0.0:
            return 0.0 if growth < 1 else math.nan
        return phi(dist.isf(min(q, 1.0)), q) * q / (c * s)

    return _quad(integrand, 0.0, (1.0 - u0) ** c)


def _lower(dist: SizeDistribution, phi, u1: float) -> float:
    """``int_0^{u1} phi(Q(t), 1-t) dt``."""
    return _quad(lambda t: phi(dist.quantile(t), 1.0 - t), 0.0, u1)


def moment(r: float, dist: SizeDistribution) -> float:
    """Raw moment ``E[X**r]``.

    Raises
    ------
    DomainError
        If ``r`` lies outside the distribution's ``moment_bounds`` (for the
        kappa-generalized law, r >= alpha/kappa).
    """
    r = float(r)
    lo, hi = dist.moment_bounds
    if not (lo < r < hi):
        raise DomainError(f"moment of order {r} does not exist (finite for {lo} < r < {hi})")
    if r == 0:
        return 1.0
    phi = lambda x, q: x ** r
    return _lower(dist, phi, _SPLIT) + _upper(dist, phi, r * dist.tail_index, _SPLIT)


def mean(dist: SizeDistribution) -> float:
    try:
        return moment(1.0, dist)
    except DomainError:
        raise DomainError("mean does not exist for this parametrization") from None


def _lorenz_scalar(u: float, dist: SizeDistribution, mu: float) -> float:
    if u == 0.0:
        return 0.0
    if u == 1.0:
        return 1.0
    ident = lambda x, q: x
    if u <= _SPLIT:
        return _lower(dist, ident, u) / mu
    return 1.0 - _upper(dist, ident, dist.tail_index, u) / mu


def lorenz(u, dist: SizeDistribution):
    """Lorenz ordinate: share of total income held by the poorest fraction ``u``."""
    scalar = np.ndim(u) == 0
    uu = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(~((uu >= 0) & (uu <= 1))):
        raise DomainError("lorenz requires 0 <= u <= 1")
    mu = mean(dist)
    out = np.array([_lorenz_scalar(float(v), dist, mu) for v in uu])
    return float(out[0]) if scalar else out


def gini(dist: SizeDistribution) -> float:
    """Gini index, one minus twice the area under the Lorenz curve."""
    mu = mean(dist)
    phi = lambda x, q: q * x
    area = _lower(dist, phi, _SPLIT) + _upper(dist, phi, dist.tail_index - 1.0, _SPLIT)
    return 1.0 - 2.0 * area / mu


def percentile_share(p1: float, p2: float, dist: SizeDistribution) -> float:
    """Income share of the population between quantiles ``p1`` and ``p2``.

    ``percentile_share(0.9, 1.0, d)`` is the top-decile share.
    """
    if not (0.0 <= p1 < p2 <= 1.0):
        raise DomainError("percentile_share requires 0 <= p1 < p2 <= 1")
    mu = mean(dist)
    return _lorenz_scalar(p2, dist, mu) - _lorenz_scalar(p1, dist, mu)


def _sorted(data: WeightedSample):
    if len(data) == 0:
        raise DomainError("empty sample")
    if np.any(data.values < 0):
        raise DomainError("inequality measures need nonnegative values")
    order = np.argsort(data.values, kind="stable")
    x, w = data.values[order], data.weights[order]
    if not np.dot(w, x) > 0:
        raise DomainError("weighted mean must be positive")
    return x, w


def sample_gini(data: WeightedSample) -> float:
    """Weighted empirical Gini index.

    Uses the covariance form ``G = 2 cov(x, F) / mean`` with midpoint
    ranks ``F_i = (W_{i-1} + w_i / 2) / W``. Tied values may appear in any
    order: their summed contribution does not depend on it.
    """
    x, w = _sorted(data)
    total = w.sum()
    cum = np.cumsum(w)
    ranks = (cum - 0.5 * w) / total
    mu = np.dot(w, x) / total
    # centered form: exact zero for constant data, less cancellation otherwise
    return float(2.0 * np.dot(w * (x - mu), ranks - 0.5) / (total * mu))


def sample_lorenz(u, data: WeightedSample):
    """Weighted empirical Lorenz curve, linearly interpolated in population share."""
    x, w = _sorted(data)
    pop = np.concatenate([[0.0], np.cumsum(w) / w.sum()])
    inc = np.concatenate([[0.0], np.cumsum(w * x)])
    inc /= inc[-1]
    return np.interp(u, pop, inc)
