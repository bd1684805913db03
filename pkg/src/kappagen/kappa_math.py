"""Kappa-deformed exponential and logarithm.

Both kernels are written through hyperbolic functions:

    log exp_k(x) = asinh(k x) / k
    ln_k(y)      = sinh(k ln y) / k

which is algebraically identical to the radical forms but never cancels
for negative ``x`` and never overflows before the final exponentiation.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "KAPPA_SWITCH",
    "DomainError",
    "check_kappa",
    "kappa_exp",
    "kappa_log",
    "log_kappa_exp",
    "log_kappa_exp_neg_pow",
]

#: Below this deformation the ordinary exp/log are used.
KAPPA_SWITCH = 1e-6


class DomainError(ValueError):
    """Argument outside the support or parameter range of a function."""


def check_kappa(kappa):
    kappa = float(kappa)
    if not (0.0 <= kappa < 1.0):
        raise DomainError(f"kappa must lie in [0, 1), got {kappa!r}")
    return kappa


def _scalar_or_array(a, was_scalar):
    return float(a) if was_scalar else a


def log_kappa_exp(x, kappa):
    """Natural logarithm of ``kappa_exp(x, kappa)``, finite for any finite x."""
    kappa = check_kappa(kappa)
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("kappa_exp argument must be finite")
    if kappa < KAPPA_SWITCH:
        out = x.copy()
    else:
        out = np.arcsinh(kappa * x) / kappa
    return _scalar_or_array(out, scalar)


def kappa_exp(x, kappa):
    """Kappa-deformed exponential ``(sqrt(1 + k^2 x^2) + k x) ** (1/k)``.

    Parameters
    ----------
    x : float or array_like
        Finite real argument.
    kappa : float
        Deformation in ``[0, 1)``. Values below ``KAPPA_SWITCH`` give
        ``exp(x)``.

    Returns
    -------
    float or ndarray
        Strictly positive values (``inf`` only when the result exceeds the
        float range).
    """
    scalar = np.ndim(x) == 0
    with np.errstate(over="ignore"):
        out = np.exp(log_kappa_exp(np.asarray(x, dtype=float), kappa))
    return _scalar_or_array(out, scalar)


def kappa_log(y, kappa):
    """Kappa-deformed logarithm ``(y**k - y**-k) / (2k)``, inverse of `kappa_exp`.

    Raises
    ------
    DomainError
        If any ``y <= 0``.
    """
    kappa = check_kappa(kappa)
    scalar = np.ndim(y) == 0
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0)):
        raise DomainError("kappa_log requires y > 0")
    ln = np.log(y)
    if kappa < KAPPA_SWITCH:
        out = ln
    else:
        with np.errstate(over="ignore"):
            out = np.sinh(kappa * ln) / kappa
    return _scalar_or_array(out, scalar)


def log_kappa_exp_neg_pow(log_t, kappa):
    """``log exp_k(-t)`` given ``log t``, without forming ``t`` when it is huge.

    Used by the distribution code, where ``t = (x/beta)**alpha`` can overflow
    for incomes far in the tail while its logarithm stays modest.
    """
    kappa = check_kappa(kappa)
    log_t = np.asarray(log_t, dtype=float)
    if kappa < KAPPA_SWITCH:
        with np.errstate(over="ignore"):
            return -np.exp(log_t)
    big = log_t > 300.0
    with np.errstate(over="ignore"):
        t = np.exp(np.where(big, 0.0, log_t))
    small_branch = -np.arcsinh(kappa * t) / kappa
    # asinh(z) = log(2z) + O(z**-2) once z = kappa * t exceeds ~1e130
    large_branch = -(np.log(2.0 * kappa) + log_t) / kappa
    return np.where(big, large_branch, small_branch)
