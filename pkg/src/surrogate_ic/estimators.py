"""scikit-learn style front ends.

:class:`SurrogateICRegression` selects regression coefficients by minimizing
AIC/BIC through annealed surrogates, and :class:`SurrogateFusionClustering`
clusters observations by fusing per-observation means.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, RegressorMixin
from sklearn.utils.validation import check_is_fitted

try:  # scikit-learn >= 1.6
    from sklearn.utils.validation import validate_data as _validate_data
except ImportError:  # pragma: no cover - older releases
    def _validate_data(est, X="no_validation", y="no_validation", **kw):
        return est._validate_data(X, y, **kw)

from ._validation import check_positive, check_seed_spec, check_smoother
from .cluster import extract_clusters
from .continuation import ContinuationSchedule, continuation_solve
from .models import GaussMeansData, LinRegData
from .objective import Mode, PenaltySpec, resolve_ic_weight

__all__ = ["SurrogateICRegression", "SurrogateFusionClustering"]


def _schedule(est, scale):
    return ContinuationSchedule.for_scale(
        scale,
        k0=est.k0,
        k_max=est.k_max,
        ratio=est.ratio,
        inner_tol=est.inner_tol,
        inner_max_iter=est.inner_max_iter,
        series_order=est.series_order,
    )


class SurrogateICRegression(RegressorMixin, BaseEstimator):
    """Linear regression with coefficients selected by an information criterion.

    The zero-pattern term of the criterion is replaced by a smooth surrogate
    whose sharpness is annealed; the terminal estimate is snapped to its zero
    pattern and refit by least squares.

    Parameters
    ----------
    criterion : {"aic", "bic"} or "gic:<c>" or float, default="aic"
        Penalty weight per free parameter.
    smoother : {"sech", "gaussian", "rational"}, default="sech"
    fit_intercept : bool, default=True
        Prepend a constant column, which is never penalized.
    k0, k_max : float, optional
        First and last smoother sharpness. Default ``0.5 / scale`` and
        ``1e4 / scale`` where ``scale`` is the median coefficient standard
        error.
    ratio : float, default=1.25
        Geometric step between sharpness values.
    inner_tol : float, optional
        Largest coordinate gradient accepted at each sharpness. Default
        ``1e-6 / scale``.
    inner_max_iter : int, default=200
        Coordinate sweeps allowed per sharpness.
    series_order : int, default=3
        Truncation order of the inversion series in the coordinate solves.
    snap_tol : float, optional
        Coefficients at most this large in magnitude are set to zero. Default
        ``1e-4 * scale``.
    seeds : sequence, default=("ols",)
        Starting points: ``"ols"``, ``"zero"`` or explicit coefficient
        vectors (with the intercept first when ``fit_intercept``). The run
        with the lowest refit criterion wins; ties go to the earlier seed.
    sigma2 : float, optional
        Known noise variance. Default: maximum-likelihood estimate from the
        full least-squares fit.
    penalized : array-like of bool, optional
        Which features may be zeroed. Default: all.

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    intercept_ : float
    support_ : ndarray of bool of shape (n_features,)
    ic_ : float
        Criterion of the refit model.
    sigma2_ : float
    paths_ : list of SolutionPath
        One per seed.
    best_seed_ : int
    converged_ : bool
        Whether the winning run met ``inner_tol`` at its last sharpness.
    """

    def __init__(
        self,
        criterion="aic",
        smoother="sech",
        fit_intercept=True,
        k0=None,
        k_max=None,
        ratio=1.25,
        inner_tol=None,
        inner_max_iter=200,
        series_order=3,
        snap_tol=None,
        seeds=("ols",),
        sigma2=None,
        penalized=None,
    ):
        self.criterion = criterion
        self.smoother = smoother
        self.fit_intercept = fit_intercept
        self.k0 = k0
        self.k_max = k_max
        self.ratio = ratio
        self.inner_tol = inner_tol
        self.inner_max_iter = inner_max_iter
        self.series_order = series_order
        self.snap_tol = snap_tol
        self.seeds = seeds
        self.sigma2 = sigma2
        self.penalized = penalized

    def _design(self, X):
        if self.fit_intercept:
            return np.column_stack([np.ones(X.shape[0]), X])
        return X

    def _seed_vector(self, seed, data):
        if isinstance(seed, str):
            if seed == "ols":
                return data.refit(np.ones(data.q, dtype=bool))
            return np.zeros(data.q)
        vec = np.asarray(seed, dtype=float).ravel()
        if vec.shape != (data.q,):
            raise ValueError(f"seed vectors need {data.q} entries, got {vec.size}")
        return vec

    def fit(self, X, y):
        X, y = _validate_data(self, X, y, dtype=float, y_numeric=True)
        check_smoother(self.smoother)
        seeds = check_seed_spec(self.seeds)
        data = LinRegData(self._design(X), y, self.sigma2, self.fit_intercept)
        mask = data.default_penalized()
        if self.penalized is not None:
            feat = np.asarray(self.penalized, dtype=bool).ravel()
            if feat.shape != (X.shape[1],):
                raise ValueError("penalized needs one flag per feature")
            mask[int(self.fit_intercept):] = feat
        c = resolve_ic_weight(self.criterion, data.n)
        scale = data.coef_scale(mask)
        snap = check_positive(self.snap_tol, "snap_tol") if self.snap_tol is not None else 1e-4 * scale
        sched = _schedule(self, scale)
        penalty = PenaltySpec(Mode.ZERO, self.smoother, c)

        self.paths_ = [
            continuation_solve(data, penalty, sched, self._seed_vector(s, data), snap, mask)
            for s in seeds
        ]
        ics = [p.polished_ic for p in self.paths_]
        best = int(np.argmin(ics))
        path = self.paths_[best]
        theta = path.polished_theta
        off = int(self.fit_intercept)
        self.intercept_ = float(theta[0]) if self.fit_intercept else 0.0
        self.coef_ = theta[off:].copy()
        self.support_ = path.pattern[off:].copy()
        self.ic_ = float(path.polished_ic)
        self.ic_weight_ = c
        self.sigma2_ = data.sigma2
        self.scale_ = scale
        self.snap_tol_ = snap
        self.schedule_ = sched
        self.best_seed_ = best
        self.converged_ = path.converged
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = _validate_data(self, X, dtype=float, reset=False)
        return X @ self.coef_ + self.intercept_


class SurrogateFusionClustering(ClusterMixin, BaseEstimator):
    """Cluster observations by fusing one free mean per observation.

    Each column is treated as an independent Gaussian sample with its own
    mean per observation. Annealing a smooth count of distinct means under
    an information criterion fuses the means into groups; observations whose
    means coincide in every column share a cluster.

    Parameters
    ----------
    criterion : {"aic", "bic"} or "gic:<c>" or float, default="bic"
    smoother : {"sech", "gaussian", "rational"}, default="sech"
    sigma : float or array-like of shape (n_features,), optional
        Known standard deviation per column. Default: sample standard
        deviation of each column.
    k0, k_max, ratio, inner_tol, inner_max_iter, series_order
        Continuation schedule; defaults scale with the column's standard
        deviation as in :class:`SurrogateICRegression`.
    snap_tol : float, optional
        Means closer than this fuse. Default ``1e-4`` times the column's
        standard deviation.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
        Merged cluster labels, numbered by first appearance.
    coordinate_labels_ : ndarray of shape (n_samples, n_features)
    split_flags_ : ndarray of bool of shape (n_samples,)
    means_ : ndarray of shape (n_samples, n_features)
        Refit fused means.
    ic_ : ndarray of shape (n_features,)
        Criterion of each column's refit partition.
    paths_ : list of SolutionPath
    converged_ : ndarray of bool of shape (n_features,)
    """

    def __init__(
        self,
        criterion="bic",
        smoother="sech",
        sigma=None,
        k0=None,
        k_max=None,
        ratio=1.25,
        inner_tol=None,
        inner_max_iter=200,
        series_order=3,
        snap_tol=None,
    ):
        self.criterion = criterion
        self.smoother = smoother
        self.sigma = sigma
        self.k0 = k0
        self.k_max = k_max
        self.ratio = ratio
        self.inner_tol = inner_tol
        self.inner_max_iter = inner_max_iter
        self.series_order = series_order
        self.snap_tol = snap_tol

    def fit(self, X, y=None):
        X = _validate_data(self, X, dtype=float)
        check_smoother(self.smoother)
        n, D = X.shape
        if n < 2:
            raise ValueError(f"clustering needs at least 2 samples, got n_samples = {n}")
        sigmas = np.broadcast_to(
            np.asarray(self.sigma if self.sigma is not None else np.nan, dtype=float), (D,)
        )
        c = resolve_ic_weight(self.criterion, n)
        penalty = PenaltySpec(Mode.FUSION, self.smoother, c)
        self.paths_ = []
        for col, s in zip(X.T, sigmas):
            data = GaussMeansData(col, None if np.isnan(s) else float(s))
            scale = data.scale
            snap = check_positive(self.snap_tol, "snap_tol") if self.snap_tol is not None else 1e-4 * scale
            self.paths_.append(continuation_solve(data, penalty, _schedule(self, scale), col, snap))
        assignment = extract_clusters([p.pattern for p in self.paths_], n, D)
        self.assignment_ = assignment
        self.labels_ = assignment.merged_labels
        self.coordinate_labels_ = assignment.per_coordinate_labels
        self.split_flags_ = assignment.split_flags
        self.means_ = np.column_stack([p.polished_theta for p in self.paths_])
        self.ic_ = np.array([p.polished_ic for p in self.paths_])
        self.ic_weight_ = c
        self.converged_ = np.array([p.converged for p in self.paths_])
        return self
