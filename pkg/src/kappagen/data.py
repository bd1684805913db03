"""Survey microdata: values with nonnegative weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kappa_math import DomainError


@dataclass(frozen=True)
class WeightedSample:
    """Observed values and their survey weights.

    Weights act as frequency multipliers. ``weights=None`` means every
    record counts once.
    """

    values: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if self.weights is None:
            weights = np.ones_like(values)
        else:
            weights = np.asarray(self.weights, dtype=float).ravel()
        if values.shape != weights.shape:
            raise ValueError(
                f"values and weights differ in length ({values.size} vs {weights.size})"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("values must be finite")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise DomainError("weights must be finite and nonnegative")
        if values.size and not weights.sum() > 0:
            raise DomainError("total weight must be positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.values.size

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def n_eff(self) -> float:
        """Kish effective sample size ``(sum w)**2 / sum w**2``."""
        w = self.weights
        return float(w.sum() ** 2 / np.dot(w, w))

    @property
    def mean(self) -> float:
        return float(np.dot(self.weights, self.values) / self.weights.sum())

    def require_positive(self) -> "WeightedSample":
        bad = np.flatnonzero(~(self.values > 0))
        if bad.size:
            i = int(bad[0])
            raise DomainError(
                f"record {i} has nonpositive value {self.values[i]!r}; "
                "income models need x > 0"
            )
        return self

    def subset(self, mask) -> "WeightedSample":
        return WeightedSample(self.values[mask], self.weights[mask])

    def scaled(self, c: float) -> "WeightedSample":
        return WeightedSample(self.values * c, self.weights)
