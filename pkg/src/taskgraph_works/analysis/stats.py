"""Weighted moments, correlation, and least squares.

Variances use the population convention: weighted squared deviations
divided by the total weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import LengthMismatch, RankDeficient, TaskGraphError, ZeroVariance

RANK_TOL = 1e-10


def _prepare(weights, *columns):
    w = np.asarray(weights, dtype=float)
    cols = [np.asarray(c, dtype=float) for c in columns]
    for c in cols:
        if c.shape != w.shape:
            raise LengthMismatch(f"length {c.shape[0] if c.ndim else 0} does not match {w.shape[0]} weights")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise TaskGraphError("weights must be finite and nonnegative")
    if w.sum() <= 0:
        raise TaskGraphError("weights must not all be zero")
    return w, cols


def weighted_mean(values, weights) -> float:
    w, (x,) = _prepare(weights, values)
    return float(np.dot(w, x) / w.sum())


def weighted_std(values, weights) -> float:
    w, (x,) = _prepare(weights, values)
    mu = np.dot(w, x) / w.sum()
    return float(np.sqrt(np.dot(w, (x - mu) ** 2) / w.sum()))


def weighted_zscore(values, weights) -> np.ndarray:
    w, (x,) = _prepare(weights, values)
    mu = np.dot(w, x) / w.sum()
    dev = x - mu
    sd = np.sqrt(np.dot(w, dev**2) / w.sum())
    if sd <= 1e-12 * max(1.0, float(np.max(np.abs(x)))):
        raise ZeroVariance("values have zero weighted variance")
    return dev / sd


def weighted_pearson(x, y, weights) -> float:
    w, (x, y) = _prepare(weights, x, y)
    if x.size < 2:
        raise LengthMismatch("need at least two observations")
    total = w.sum()
    dx = x - np.dot(w, x) / total
    dy = y - np.dot(w, y) / total
    vx = np.dot(w, dx * dx)
    vy = np.dot(w, dy * dy)
    if vx <= 0 or vy <= 0:
        raise ZeroVariance("correlation undefined: a variable has zero weighted variance")
    r = float(np.dot(w, dx * dy) / np.sqrt(vx * vy))
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True)
class OLSResult:
    coefficients: np.ndarray
    residuals: np.ndarray
    r_squared: float


def weighted_ols(y, X, weights, *, add_intercept: bool = False) -> OLSResult:
    """Minimise ``sum_i w_i (y_i - x_i b)^2``.

    Solved by SVD of the ``sqrt(w)``-scaled design.  A design whose smallest
    singular value falls below ``1e-10`` of the largest is rejected.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if add_intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
    if X.shape[0] != y.shape[0]:
        raise LengthMismatch(f"design has {X.shape[0]} rows but y has {y.shape[0]}")
    w, (y,) = _prepare(weights, y)
    if X.shape[0] < X.shape[1]:
        raise RankDeficient(f"{X.shape[0]} rows cannot identify {X.shape[1]} coefficients")
    root = np.sqrt(w)
    A = X * root[:, None]
    b = y * root
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[-1] <= RANK_TOL * s[0]:
        raise RankDeficient("weighted design matrix is rank deficient")
    beta = Vt.T @ ((U.T @ b) / s)
    resid = y - X @ beta
    ybar = np.dot(w, y) / w.sum()
    tss = np.dot(w, (y - ybar) ** 2)
    rss = np.dot(w, resid**2)
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    return OLSResult(beta, resid, float(r2))


def residualize(y, controls, weights) -> np.ndarray:
    """Residuals of ``y`` after a weighted regression on ``controls`` plus an intercept."""
    return weighted_ols(y, controls, weights, add_intercept=True).residuals
