"""Size distributions on the positive half-line.

The kappa-generalized law has

    F(x) = 1 - exp_k(-(x/beta)**alpha)
    f(x) = (alpha/beta) (x/beta)**(alpha-1) exp_k(-(x/beta)**alpha)
           / sqrt(1 + k**2 (x/beta)**(2 alpha))

with alpha, beta > 0 and 0 <= k < 1. It reduces to the Weibull law as
k -> 0 and has a Pareto upper tail with exponent alpha/k otherwise.

Baselines used for model comparison:

* Weibull(shape, scale):     F(x) = 1 - exp(-(x/scale)**shape)
* Exponential(scale):        F(x) = 1 - exp(-x/scale)
* SinghMaddala(a, b, q):     F(x) = 1 - (1 + (x/b)**a)**(-q)
* DagumI(a, b, p):           F(x) = (1 + (x/b)**(-a))**(-p)

All classes share one contract: ``pdf``, ``logpdf``, ``cdf``, ``ccdf``,
``quantile``, ``isf`` and ``sample``, vectorized over numpy arrays.
Everything is computed in log space so the far tail neither overflows nor
cancels; the CCDF is never formed as ``1 - cdf``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from typing import ClassVar

import numpy as np

from .kappa_math import (
    DomainError,
    check_kappa,
    kappa_log,
    log_kappa_exp_neg_pow,
)
from .rng import make_rng

__all__ = [
    "SizeDistribution",
    "KappaGeneralized",
    "KappaParams",
    "Weibull",
    "Exponential",
    "SinghMaddala",
    "DagumI",
    "MODELS",
    "make_model",
    "kgen_pdf",
    "kgen_logpdf",
    "kgen_cdf",
    "kgen_ccdf",
    "kgen_quantile",
    "kgen_sample",
    "kgen_tail_exponent",
    "dist_eval",
]

# kappa is mapped onto [0, KAPPA_MAX] during fitting
KAPPA_MAX = 1.0 - 1e-6


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return value


def _out(a, scalar):
    return float(a) if scalar else a


def _support_open(x):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)) or np.any(np.isinf(x)):
        raise DomainError("density is defined for finite x > 0 only")
    return x, scalar


def _support_closed(x):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0)):
        raise DomainError("distribution functions are defined for x >= 0 only")
    return x, scalar


def _probability(u):
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if np.any(~((u >= 0) & (u < 1))):
        raise DomainError("quantile requires 0 <= u < 1")
    return u, scalar


def _upper_probability(q):
    scalar = np.ndim(q) == 0
    q = np.asarray(q, dtype=float)
    if np.any(~((q > 0) & (q <= 1))):
        raise DomainError("isf requires 0 < q <= 1")
    return q, scalar


def _log_ratio(x, scale):
    with np.errstate(divide="ignore"):
        return np.log(x) - math.log(scale)


class SizeDistribution(ABC):
    """Common contract for the income-size distributions."""

    name: ClassVar[str]
    param_names: ClassVar[tuple[str, ...]]

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    @property
    def params(self) -> dict[str, float]:
        return asdict(self)

    @abstractmethod
    def logpdf(self, x): ...

    @abstractmethod
    def log_ccdf(self, x):
        """Log survival function on x >= 0 (input already validated)."""

    @abstractmethod
    def _quantile(self, u): ...

    @abstractmethod
    def _isf(self, q): ...

    @property
    @abstractmethod
    def tail_index(self) -> float:
        """Reciprocal Pareto exponent of the upper tail, 0 for light tails."""

    @property
    @abstractmethod
    def moment_bounds(self) -> tuple[float, float]:
        """Open interval of orders r for which E[X**r] is finite."""

    def pdf(self, x):
        x, scalar = _support_open(x)
        return _out(np.exp(self._logpdf(x)), scalar)

    def cdf(self, x):
        x, scalar = _support_closed(x)
        return _out(-np.expm1(self.log_ccdf(x)), scalar)

    def ccdf(self, x):
        x, scalar = _support_closed(x)
        return _out(np.exp(self.log_ccdf(x)), scalar)

    sf = ccdf

    def quantile(self, u):
        """Inverse CDF on ``[0, 1)``."""
        u, scalar = _probability(u)
        return _out(self._quantile(u), scalar)

    ppf = quantile

    def isf(self, q):
        """Inverse survival function: the x with ``ccdf(x) = q``, q in (0, 1]."""
        q, scalar = _upper_probability(q)
        return _out(self._isf(q), scalar)

    def sample(self, n: int, seed=None) -> np.ndarray:
        """``n`` draws by inverse-transform sampling from a PCG64 stream."""
        if n < 0:
            raise ValueError("sample size must be nonnegative")
        if n == 0:
            return np.empty(0)
        return self._quantile(make_rng(seed).random(n))

    # unconstrained parametrization used by the optimizer
    def to_unconstrained(self) -> np.ndarray:
        return np.log([getattr(self, p) for p in self.param_names])

    @classmethod
    def from_unconstrained(cls, z):
        return cls(*np.exp(np.asarray(z, dtype=float)))

    def rescaled(self, c: float):
        """Distribution of ``c * X``."""
        raise NotImplementedError

    def _logpdf(self, x):
        return self.logpdf(x)


@dataclass(frozen=True)
class KappaGeneralized(SizeDistribution):
    """Kappa-generalized distribution with shape ``alpha``, scale ``beta``
    and tail deformation ``kappa``."""

    alpha: float
    beta: float
    kappa: float

    name: ClassVar[str] = "kgen"
    param_names: ClassVar[tuple[str, ...]] = ("alpha", "beta", "kappa")

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))
        object.__setattr__(self, "beta", _positive("beta", self.beta))
        object.__setattr__(self, "kappa", check_kappa(self.kappa))

    def logpdf(self, x):
        x, scalar = _support_open(x)
        return _out(self._logpdf(x), scalar)

    def _logpdf(self, x):
        a, k = self.alpha, self.kappa
        lr = _log_ratio(x, self.beta)
        lt = a * lr
        out = math.log(a / self.beta) + (a - 1.0) * lr + log_kappa_exp_neg_pow(lt, k)
        if k > 0:
            # log sqrt(1 + k^2 t^2)
            out = out - 0.5 * np.logaddexp(0.0, 2.0 * (math.log(k) + lt))
        return out

    def log_ccdf(self, x):
        return log_kappa_exp_neg_pow(self.alpha * _log_ratio(x, self.beta), self.kappa)

    def _quantile(self, u):
        return self.beta * kappa_log(1.0 / (1.0 - u), self.kappa) ** (1.0 / self.alpha)

    def _isf(self, q):
        return self.beta * kappa_log(1.0 / q, self.kappa) ** (1.0 / self.alpha)

    @property
    def tail_exponent(self) -> float:
        if self.kappa == 0:
            raise DomainError("tail is stretched-exponential, no Pareto exponent")
        return self.alpha / self.kappa

    @property
    def tail_index(self) -> float:
        return self.kappa / self.alpha

    @property
    def moment_bounds(self):
        upper = math.inf if self.kappa == 0 else self.alpha / self.kappa
        return (-self.alpha, upper)

    def to_unconstrained(self):
        # logit of kappa / KAPPA_MAX, clipped so kappa = 0 maps to a finite point
        s = min(max(self.kappa / KAPPA_MAX, 1e-12), 1 - 1e-12)
        return np.array([math.log(self.alpha), math.log(self.beta), math.log(s / (1 - s))])

    @classmethod
    def from_unconstrained(cls, z):
        a, b, k = (float(v) for v in z)
        return cls(math.exp(a), math.exp(b), KAPPA_MAX / (1.0 + math.exp(-k)))

    def rescaled(self, c):
        return KappaGeneralized(self.alpha, self.beta * c, self.kappa)


#: The (alpha, beta, kappa) triple doubles as the distribution object.
KappaParams = KappaGeneralized


@dataclass(frozen=True)
class Weibull(SizeDistribution):
    shape: float
    scale: float

    name: ClassVar[str] = "weibull"
    param_names: ClassVar[tuple[str, ...]] = ("shape", "scale")

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("shape", self.shape))
        object.__setattr__(self, "scale", _positive("scale", self.scale))

    def logpdf(self, x):
        x, scalar = _support_open(x)
        return _out(self._logpdf(x), scalar)

    def _logpdf(self, x):
        k = self.shape
        lr = _log_ratio(x, self.scale)
        with np.errstate(over="ignore"):
            return math.log(k / self.scale) + (k - 1.0) * lr - np.exp(k * lr)

    def log_ccdf(self, x):
        with np.errstate(over="ignore"):
            return -np.exp(self.shape * _log_ratio(x, self.scale))

    def _quantile(self, u):
        return self.scale * (-np.log1p(-u)) ** (1.0 / self.shape)

    def _isf(self, q):
        return self.scale * (-np.log(q)) ** (1.0 / self.shape)

    @property
    def tail_index(self):
        return 0.0

    @property
    def moment_bounds(self):
        return (-self.shape, math.inf)

    def rescaled(self, c):
        return Weibull(self.shape, self.scale * c)


@dataclass(frozen=True)
class Exponential(SizeDistribution):
    scale: float

    name: ClassVar[str] = "exponential"
    param_names: ClassVar[tuple[str, ...]] = ("scale",)

    def __post_init__(self):
        object.__setattr__(self, "scale", _positive("scale", self.scale))

    def logpdf(self, x):
        x, scalar = _support_open(x)
        return _out(self._logpdf(x), scalar)

    def _logpdf(self, x):
        return -math.log(self.scale) - x / self.scale

    def log_ccdf(self, x):
        return -x / self.scale

    def _quantile(self, u):
        return -self.scale * np.log1p(-u)

    def _isf(self, q):
        return -self.scale * np.log(q)

    @property
    def tail_index(self):
        return 0.0

    @property
    def moment_bounds(self):
        return (-1.0, math.inf)

    def rescaled(self, c):
        return Exponential(self.scale * c)


@dataclass(frozen=True)
class SinghMaddala(SizeDistribution):
    a: float
    b: float
    q: float

    name: ClassVar[str] = "singh-maddala"
    param_names: ClassVar[tuple[str, ...]] = ("a", "b", "q")

    def __post_init__(self):
        for p in self.param_names:
            object.__setattr__(self, p, _positive(p, getattr(self, p)))

    def logpdf(self, x):
        x, scalar = _support_open(x)
        return _out(self._logpdf(x), scalar)

    def _logpdf(self, x):
        a, q = self.a, self.q
        lr = _log_ratio(x, self.b)
        return math.log(a * q / self.b) + (a - 1.0) * lr - (q + 1.0) * np.logaddexp(0.0, a * lr)

    def log_ccdf(self, x):
        return -self.q * np.logaddexp(0.0, self.a * _log_ratio(x, self.b))

    def _quantile(self, u):
        return self.b * np.expm1(-np.log1p(-u) / self.q) ** (1.0 / self.a)

    def _isf(self, q):
        return self.b * np.expm1(-np.log(q) / self.q) ** (1.0 / self.a)

    @property
    def tail_index(self):
        return 1.0 / (self.a * self.q)

    @property
    def moment_bounds(self):
        return (-self.a, self.a * self.q)

    def rescaled(self, c):
        return SinghMaddala(self.a, self.b * c, self.q)


@dataclass(frozen=True)
class DagumI(SizeDistribution):
    a: float
    b: float
    p: float

    name: ClassVar[str] = "dagum"
    param_names: ClassVar[tuple[str, ...]] = ("a", "b", "p")

    def __post_init__(self):
        for p in self.param_names:
            object.__setattr__(self, p, _positive(p, getattr(self, p)))

    def logpdf(self, x):
        x, scalar = _support_open(x)
        return _out(self._logpdf(x), scalar)

    def _logpdf(self, x):
        a, p = self.a, self.p
        lr = _log_ratio(x, self.b)
        return math.log(a * p / self.b) + (a * p - 1.0) * lr - (p + 1.0) * np.logaddexp(0.0, a * lr)

    def _log_cdf(self, x):
        return -self.p * np.logaddexp(0.0, -self.a * _log_ratio(x, self.b))

    def cdf(self, x):
        x, scalar = _support_closed(x)
        return _out(np.exp(self._log_cdf(x)), scalar)

    def log_ccdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(-np.expm1(self._log_cdf(x)))

    def _quantile(self, u):
        with np.errstate(divide="ignore"):
            return self.b * np.expm1(-np.log(u) / self.p) ** (-1.0 / self.a)

    def _isf(self, q):
        return self.b * np.expm1(-np.log1p(-q) / self.p) ** (-1.0 / self.a)

    @property
    def tail_index(self):
        return 1.0 / self.a

    @property
    def moment_bounds(self):
        return (-self.a * self.p, self.a)

    def rescaled(self, c):
        return DagumI(self.a, self.b * c, self.p)


MODELS: dict[str, type[SizeDistribution]] = {
    cls.name: cls for cls in (KappaGeneralized, Weibull, Exponential, SinghMaddala, DagumI)
}


def make_model(kind: str, *params: float) -> SizeDistribution:
    """Instantiate a model by its short name (``kgen``, ``weibull``, ...)."""
    try:
        cls = MODELS[kind]
    except KeyError:
        raise ValueError(f"unknown model {kind!r}; choose from {sorted(MODELS)}") from None
    return cls(*params)


# Functional interface for the kappa-generalized law.

def kgen_pdf(x, p: KappaParams):
    return p.pdf(x)


def kgen_logpdf(x, p: KappaParams):
    return p.logpdf(x)


def kgen_cdf(x, p: KappaParams):
    return p.cdf(x)


def kgen_ccdf(x, p: KappaParams):
    return p.ccdf(x)


def kgen_quantile(u, p: KappaParams):
    return p.quantile(u)


def kgen_sample(n: int, p: KappaParams, seed=None) -> np.ndarray:
    return p.sample(n, seed)


def kgen_tail_exponent(p: KappaParams) -> float:
    """Pareto exponent ``alpha / kappa`` of the upper tail."""
    return p.tail_exponent


def dist_eval(model: SizeDistribution, x, u=None) -> dict:
    """Evaluate every distribution function of ``model`` at ``x`` (and ``u``)."""
    out = {
        "pdf": model.pdf(x),
        "logpdf": model.logpdf(x),
        "cdf": model.cdf(x),
        "ccdf": model.ccdf(x),
    }
    if u is not None:
        out["quantile"] = model.quantile(u)
    return out
