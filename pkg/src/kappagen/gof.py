"""Goodness of fit and model comparison."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import WeightedSample
from .fitting import FitConfig, FitResult, fit_mle

__all__ = ["ks_statistic", "tail_ks_statistic", "ComparisonRow", "compare", "DEFAULT_MODELS"]

DEFAULT_MODELS = ("kgen", "weibull", "exponential", "singh-maddala", "dagum")


def _ecdf_gaps(data: WeightedSample, cdf):
    if len(data) == 0:
        raise ValueError("KS statistic of an empty sample")
    order = np.argsort(data.values, kind="stable")
    x, w = data.values[order], data.weights[order]
    # collapse ties so the empirical CDF jumps once per distinct value
    xs, start = np.unique(x, return_index=True)
    cum = np.cumsum(w)
    upper = cum[np.append(start[1:] - 1, x.size - 1)] / cum[-1]
    lower = np.concatenate([[0.0], upper[:-1]])
    f = np.asarray(cdf(xs), dtype=float)
    return xs, np.maximum(np.abs(upper - f), np.abs(f - lower))


def ks_statistic(data: WeightedSample, cdf) -> float:
    """Weighted Kolmogorov-Smirnov distance ``sup |F_n - F|``.

    ``cdf`` is any callable (or an object with a ``cdf`` method) evaluated
    at the sorted distinct data values; ``F_n`` uses cumulative normalized
    weights. No p-value is attached: with estimated parameters the usual
    null distribution does not apply.
    """
    cdf = getattr(cdf, "cdf", cdf)
    _, gaps = _ecdf_gaps(data, cdf)
    return float(gaps.max())


def tail_ks_statistic(data: WeightedSample, cdf, top: float = 0.1) -> float:
    """KS distance restricted to data points in the weighted top ``top`` share.

    A right-tail diagnostic; not a formal test.
    """
    cdf = getattr(cdf, "cdf", cdf)
    xs, gaps = _ecdf_gaps(data, cdf)
    order = np.argsort(data.values, kind="stable")
    cum = np.cumsum(data.weights[order]) / data.weights.sum()
    cut = data.values[order][min(np.searchsorted(cum, 1.0 - top), len(data) - 1)]
    sel = xs >= cut
    return float(gaps[sel].max())


@dataclass(frozen=True)
class ComparisonRow:
    rank: int
    model: str
    k: int
    loglik: float
    aic: float
    bic: float
    ks_statistic: float
    ks_top_decile: float
    converged: bool
    fit: FitResult


def compare(data: WeightedSample, models=DEFAULT_MODELS, config: FitConfig | None = None) -> list[ComparisonRow]:
    """Fit every model and rank them by AIC.

    Rows of fits that failed to converge are kept, flagged, and placed
    after all converged rows. Ties are broken by model name.
    """
    models = list(models)
    if len(models) < 2:
        raise ValueError("compare needs at least two models")
    config = config or FitConfig()
    fits = [fit_mle(data, m, config) for m in models]
    fits.sort(key=lambda r: (not r.converged, r.aic, r.model))
    return [
        ComparisonRow(
            rank=i + 1,
            model=r.model,
            k=r.k,
            loglik=r.loglik,
            aic=r.aic,
            bic=r.bic,
            ks_statistic=ks_statistic(data, r.params),
            ks_top_decile=tail_ks_statistic(data, r.params),
            converged=r.converged,
            fit=r,
        )
        for i, r in enumerate(fits)
    ]
