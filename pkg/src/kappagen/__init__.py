"""Kappa-generalized income and wealth distributions.

Kernels, weighted maximum-likelihood fitting, inequality measures, a
net-wealth mixture on the real line, and model comparison.
"""

from .data import WeightedSample
from .distributions import (
    MODELS,
    DagumI,
    Exponential,
    KappaGeneralized,
    KappaParams,
    SinghMaddala,
    SizeDistribution,
    Weibull,
    dist_eval,
    kgen_ccdf,
    kgen_cdf,
    kgen_logpdf,
    kgen_pdf,
    kgen_quantile,
    kgen_sample,
    kgen_tail_exponent,
    make_model,
)
from .fitting import FitConfig, FitResult, fit_mle, initialize, log_likelihood, stderr_bootstrap
from .gof import ComparisonRow, compare, ks_statistic, tail_ks_statistic
from .inequality import gini, lorenz, mean, moment, percentile_share, sample_gini, sample_lorenz
from .kappa_math import DomainError, kappa_exp, kappa_log, log_kappa_exp
from .mixture import (
    NetWealthMixture,
    NetWealthMixtureParams,
    fit_mixture,
    mixture_cdf,
    mixture_log_likelihood,
    sample_mixture,
)

__version__ = "0.1.0"
