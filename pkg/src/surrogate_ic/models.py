"""Gaussian likelihood models exposing coordinate scores and information."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

__all__ = [
    "LikelihoodModel",
    "LinRegData",
    "GaussMeansData",
    "ols",
]

_LOG_2PI = float(np.log(2.0 * np.pi))


@runtime_checkable
class LikelihoodModel(Protocol):
    """What the surrogate objectives need from a model.

    ``info(theta, j)`` is the negated derivative of ``score(theta, j)`` with
    respect to ``theta[j]``.
    """

    @property
    def q(self) -> int: ...

    @property
    def n(self) -> int: ...

    def loglik(self, theta) -> float: ...

    def score(self, theta, j: int) -> float: ...

    def info(self, theta, j: int) -> float: ...


def _as_theta(theta, q):
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (q,):
        raise ValueError(f"expected a parameter vector of length {q}, got shape {theta.shape}")
    return theta


def _check_index(j, q):
    if not 0 <= j < q:
        raise IndexError(f"coordinate {j} out of range for {q} parameters")


def ols(X, y) -> np.ndarray:
    """Least-squares coefficients; an empty design returns an empty vector."""
    X = np.asarray(X, dtype=float)
    if X.shape[1] == 0:
        return np.zeros(0)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return coef


@dataclass(frozen=True, eq=False)
class LinRegData:
    """Linear regression with known noise variance.

    Parameters
    ----------
    X : ndarray of shape (n, q)
        Design matrix. When ``intercept`` is true its first column is the
        constant column.
    y : ndarray of shape (n,)
    sigma2 : float, optional
        Noise variance treated as known. Defaults to the maximum-likelihood
        estimate from the full least-squares fit (denominator ``n``).
    intercept : bool
        Whether column 0 is an intercept.
    """

    X: np.ndarray
    y: np.ndarray
    sigma2: float | None = None
    intercept: bool = False

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float).ravel()
        if X.ndim != 2:
            raise ValueError("X must be two-dimensional")
        if X.shape[0] != y.shape[0] or X.shape[0] == 0:
            raise ValueError("X and y must have the same, non-zero number of rows")
        if X.shape[1] == 0:
            raise ValueError("X must have at least one column")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("X and y must be finite")
        if np.any(np.all(X == 0.0, axis=0)):
            raise ValueError("X has a column of zeros")
        if self.intercept and not np.all(X[:, 0] == 1.0):
            raise ValueError("intercept=True requires a column of ones first")
        sigma2 = self.sigma2
        if sigma2 is None:
            resid = y - X @ ols(X, y)
            sigma2 = float(resid @ resid) / X.shape[0]
        sigma2 = float(sigma2)
        if not sigma2 > 0 or not np.isfinite(sigma2):
            raise ValueError("sigma2 must be positive; the full fit may be exact")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "sigma2", sigma2)
        object.__setattr__(self, "_colsq", np.einsum("ij,ij->j", X, X))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def q(self) -> int:
        return self.X.shape[1]

    def default_penalized(self) -> np.ndarray:
        mask = np.ones(self.q, dtype=bool)
        if self.intercept:
            mask[0] = False
        return mask

    def loglik(self, theta) -> float:
        theta = _as_theta(theta, self.q)
        r = self.y - self.X @ theta
        return -0.5 * self.n * (_LOG_2PI + np.log(self.sigma2)) - float(r @ r) / (2.0 * self.sigma2)

    def score(self, theta, j: int) -> float:
        theta = _as_theta(theta, self.q)
        _check_index(j, self.q)
        r = self.y - self.X @ theta
        return float(self.X[:, j] @ r) / self.sigma2

    def info(self, theta, j: int) -> float:
        _check_index(j, self.q)
        return float(self._colsq[j]) / self.sigma2

    def score_vector(self, theta) -> np.ndarray:
        theta = _as_theta(theta, self.q)
        return self.X.T @ (self.y - self.X @ theta) / self.sigma2

    def info_vector(self, theta) -> np.ndarray:
        return self._colsq / self.sigma2

    def coef_scale(self, penalized=None) -> float:
        """Median of ``sqrt(sigma2 / ||X_j||**2)`` over the penalized columns.

        This is the standard error each coefficient would have with the other
        columns held fixed, used as the natural unit for coefficient values.
        """
        mask = self.default_penalized() if penalized is None else np.asarray(penalized, bool)
        if not mask.any():
            mask = np.ones(self.q, dtype=bool)
        return float(np.median(np.sqrt(self.sigma2 / self._colsq[mask])))

    def refit(self, support) -> np.ndarray:
        """Maximum-likelihood coefficients with columns outside ``support``
        fixed at zero."""
        support = np.asarray(support, dtype=bool)
        theta = np.zeros(self.q)
        theta[support] = ols(self.X[:, support], self.y)
        return theta


@dataclass(frozen=True, eq=False)
class GaussMeansData:
    """Independent Gaussian observations, each with its own mean.

    The parameter vector holds one mean per observation, so ``q == n``.

    Parameters
    ----------
    y : ndarray of shape (n,)
    sigma : float, optional
        Common standard deviation. Defaults to the sample standard deviation
        of ``y`` (``ddof=1``), or 1 when ``n == 1`` or ``y`` is constant.
    """

    y: np.ndarray
    sigma: float | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        if y.size == 0:
            raise ValueError("need at least one observation")
        if not np.all(np.isfinite(y)):
            raise ValueError("y must be finite")
        sigma = self.sigma
        if sigma is None:
            sigma = float(np.std(y, ddof=1)) if y.size > 1 else 1.0
            if sigma == 0.0:
                sigma = 1.0
        sigma = float(sigma)
        if not sigma > 0 or not np.isfinite(sigma):
            raise ValueError("sigma must be positive")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def q(self) -> int:
        return self.y.shape[0]

    @property
    def scale(self) -> float:
        """Data scale used for default schedules and snap tolerances."""
        s = float(np.std(self.y, ddof=1)) if self.n > 1 else 0.0
        return s if s > 0 else self.sigma

    def loglik(self, mu) -> float:
        mu = _as_theta(mu, self.q)
        r = self.y - mu
        s2 = self.sigma**2
        return -0.5 * self.n * (_LOG_2PI + np.log(s2)) - float(r @ r) / (2.0 * s2)

    def score(self, mu, i: int) -> float:
        mu = _as_theta(mu, self.q)
        _check_index(i, self.q)
        return (self.y[i] - mu[i]) / self.sigma**2

    def info(self, mu, i: int) -> float:
        _check_index(i, self.q)
        return 1.0 / self.sigma**2

    def score_vector(self, mu) -> np.ndarray:
        mu = _as_theta(mu, self.q)
        return (self.y - mu) / self.sigma**2

    def info_vector(self, mu) -> np.ndarray:
        return np.full(self.n, 1.0 / self.sigma**2)

    def refit(self, labels) -> np.ndarray:
        """Group means for the partition given by ``labels``."""
        labels = np.asarray(labels)
        if labels.shape != (self.n,):
            raise ValueError("one label per observation required")
        mu = np.empty(self.n)
        for g in np.unique(labels):
            members = labels == g
            mu[members] = self.y[members].mean()
        return mu
