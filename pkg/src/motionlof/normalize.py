"""Per-feature z-normalization with train-time statistics.

Statistics are learned once from the training (normal) feature matrix and
frozen; the same statistics transform test and outlier vectors. Standard
deviation uses the population convention (divisor n). Columns with sigma
below 1e-12 are treated as constant: the divisor falls back to 1, so a
constant feature maps to exactly 0 instead of NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ShapeError

SIGMA_FLOOR = 1e-12


@dataclass
class NormStats:
    mu: np.ndarray
    sigma: np.ndarray
    n_fit: int

    @property
    def d(self):
        return self.mu.shape[0]


def fit_norm(X):
    """Column means and population standard deviations of an n x d matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError(f"expected 2-D matrix, got shape {X.shape}")
    n = X.shape[0]
    if n < 2:
        raise InsufficientDataError(f"fit_norm needs >= 2 rows, got {n}")
    mu = X.mean(axis=0)
    # np.mean of n identical floats can be an ulp off the value; snap the
    # mean of exactly constant columns so they standardize to exactly 0
    const = np.all(X == X[0], axis=0)
    mu[const] = X[0, const]
    return NormStats(mu=mu, sigma=X.std(axis=0), n_fit=n)


def apply_norm(stats, x):
    """Standardize a vector (or matrix of row vectors) with frozen stats."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != stats.d:
        raise ShapeError(f"dimension mismatch: vector has {x.shape[-1]} features, "
                         f"stats expect {stats.d}")
    denom = np.where(stats.sigma >= SIGMA_FLOOR, stats.sigma, 1.0)
    return (x - stats.mu) / denom
