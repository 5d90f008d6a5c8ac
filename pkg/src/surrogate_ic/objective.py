"""Smooth surrogates of information criteria ``-2 loglik + c_n * p``.

Two ways of counting free parameters are supported:

* zero penalty: ``p = q - #{j : theta_j == 0}`` over the penalized
  coordinates, smoothed as ``q - sum_j d_k(theta_j)``;
* fusion penalty: ``p = number of distinct values of theta``, smoothed as
  ``q - sum_j d_k(theta_(j) - theta_(j-1))`` over adjacent sorted values.

Both surrogates converge pointwise to the integer count as ``k`` grows.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .models import LikelihoodModel
from .smoothers import Family, Smoother

__all__ = [
    "EvaluationError",
    "Mode",
    "PenaltySpec",
    "SurrogateObjective",
    "resolve_ic_weight",
    "surrogate_ic",
    "surrogate_ic_grad",
    "surrogate_ic_hess_diag",
    "fusion_pk",
    "fusion_pk_grad",
    "fusion_pk_hess_diag",
    "zero_pk",
    "exact_count",
    "exact_ic",
]


class EvaluationError(ArithmeticError):
    """The model log-likelihood was not finite."""


class Mode(str, Enum):
    ZERO = "zero"
    FUSION = "fusion"


def resolve_ic_weight(objective, n: int) -> float:
    """Penalty weight ``c_n`` from ``"aic"``, ``"bic"``, ``"gic:<c>"`` or a number."""
    if isinstance(objective, (int, float)) and not isinstance(objective, bool):
        c = float(objective)
    else:
        name = str(objective).strip().lower()
        if name == "aic":
            c = 2.0
        elif name == "bic":
            c = math.log(n)
        elif name.startswith("gic:"):
            try:
                c = float(name[4:])
            except ValueError:
                raise ValueError(f"cannot parse generalized IC weight from {objective!r}") from None
        else:
            raise ValueError(f"unknown objective {objective!r}; use aic, bic or gic:<c>")
    if not c > 0 or not math.isfinite(c):
        raise ValueError(f"IC weight must be positive, got {c}")
    return c


@dataclass(frozen=True)
class PenaltySpec:
    mode: Mode = Mode.ZERO
    smoother: Family = Family.SECH
    ic_weight: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "smoother", Family(self.smoother))
        c = float(self.ic_weight)
        if not c > 0 or not math.isfinite(c):
            raise ValueError("ic_weight must be positive")
        object.__setattr__(self, "ic_weight", c)


def _sorted_neighbors(theta, j):
    """Values just below and just above ``theta[j]`` in the stable sort order."""
    order = np.argsort(theta, kind="stable")
    rank = int(np.flatnonzero(order == j)[0])
    below = theta[order[rank - 1]] if rank > 0 else None
    above = theta[order[rank + 1]] if rank < len(theta) - 1 else None
    return below, above


def fusion_pk(theta, smoother: Smoother) -> float:
    """Smoothed count of distinct values, in ``[1, q]``."""
    theta = np.asarray(theta, dtype=float)
    if theta.size < 1:
        raise ValueError("need at least one parameter")
    gaps = np.diff(np.sort(theta))
    return theta.size - float(np.sum(smoother.value(gaps)))


def fusion_pk_grad(theta, j: int, smoother: Smoother) -> float:
    theta = np.asarray(theta, dtype=float)
    below, above = _sorted_neighbors(theta, j)
    g = 0.0
    if below is not None:
        g -= smoother.deriv1(theta[j] - below)
    if above is not None:
        g += smoother.deriv1(above - theta[j])
    return g


def fusion_pk_hess_diag(theta, j: int, smoother: Smoother) -> float:
    theta = np.asarray(theta, dtype=float)
    below, above = _sorted_neighbors(theta, j)
    h = 0.0
    if below is not None:
        h -= smoother.deriv2(theta[j] - below)
    if above is not None:
        h -= smoother.deriv2(above - theta[j])
    return h


def zero_pk(theta, smoother: Smoother, penalized=None) -> float:
    """Smoothed count of non-zero coordinates; unpenalized ones always count."""
    theta = np.asarray(theta, dtype=float)
    mask = np.ones(theta.size, bool) if penalized is None else np.asarray(penalized, bool)
    return theta.size - float(np.sum(smoother.value(theta[mask])))


def exact_count(theta, mode, penalized=None) -> int:
    """Integer free-parameter count using exact equality."""
    theta = np.asarray(theta, dtype=float)
    if Mode(mode) is Mode.FUSION:
        return int(np.unique(theta).size)
    mask = np.ones(theta.size, bool) if penalized is None else np.asarray(penalized, bool)
    return int(np.count_nonzero(~mask) + np.count_nonzero(theta[mask] != 0.0))


def exact_ic(model: LikelihoodModel, theta, ic_weight: float, count: int) -> float:
    return -2.0 * model.loglik(theta) + ic_weight * count


@dataclass(frozen=True, eq=False)
class SurrogateObjective:
    """The surrogate criterion for one model, penalty and sharpness.

    Parameters
    ----------
    model : LikelihoodModel
    penalty : PenaltySpec
    k : float
        Smoother sharpness.
    penalized : array of bool, optional
        Zero mode only: which coordinates carry the zero penalty. Defaults to
        the model's ``default_penalized()`` when present, else all.
    """

    model: LikelihoodModel
    penalty: PenaltySpec
    k: float
    penalized: np.ndarray | None = None

    def __post_init__(self):
        if self.model.q < 1:
            raise ValueError("model must have at least one parameter")
        smoother = Smoother(self.penalty.smoother, self.k)
        object.__setattr__(self, "k", smoother.k)
        object.__setattr__(self, "smoother", smoother)
        mask = self.penalized
        if mask is None:
            default = getattr(self.model, "default_penalized", None)
            mask = default() if default is not None else np.ones(self.model.q, bool)
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.model.q,):
            raise ValueError("penalized mask must have one entry per parameter")
        object.__setattr__(self, "penalized", mask)

    @property
    def q(self) -> int:
        return self.model.q

    @property
    def c(self) -> float:
        return self.penalty.ic_weight

    def with_k(self, k: float) -> "SurrogateObjective":
        return SurrogateObjective(self.model, self.penalty, k, self.penalized)

    def _theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.q,):
            raise ValueError(f"expected {self.q} parameters, got shape {theta.shape}")
        if not np.all(np.isfinite(theta)):
            raise ValueError("parameters must be finite")
        return theta

    def _check_j(self, j):
        if not 0 <= j < self.q:
            raise IndexError(f"coordinate {j} out of range for {self.q} parameters")

    def count(self, theta) -> float:
        """Surrogate free-parameter count ``p_k``."""
        theta = self._theta(theta)
        if self.penalty.mode is Mode.FUSION:
            return fusion_pk(theta, self.smoother)
        return zero_pk(theta, self.smoother, self.penalized)

    def value(self, theta) -> float:
        theta = self._theta(theta)
        ll = self.model.loglik(theta)
        if not math.isfinite(ll):
            raise EvaluationError(f"log-likelihood is {ll}")
        return -2.0 * ll + self.c * self.count(theta)

    def penalty_grad(self, theta, j: int) -> float:
        if self.penalty.mode is Mode.FUSION:
            return fusion_pk_grad(theta, j, self.smoother)
        if not self.penalized[j]:
            return 0.0
        return -self.smoother.deriv1(theta[j])

    def penalty_hess(self, theta, j: int) -> float:
        if self.penalty.mode is Mode.FUSION:
            return fusion_pk_hess_diag(theta, j, self.smoother)
        if not self.penalized[j]:
            return 0.0
        return -self.smoother.deriv2(theta[j])

    def grad(self, theta, j: int) -> float:
        theta = self._theta(theta)
        self._check_j(j)
        return -2.0 * self.model.score(theta, j) + self.c * self.penalty_grad(theta, j)

    def hess_diag(self, theta, j: int) -> float:
        theta = self._theta(theta)
        self._check_j(j)
        return 2.0 * self.model.info(theta, j) + self.c * self.penalty_hess(theta, j)

    def _model_vector(self, name, theta):
        fn = getattr(self.model, name + "_vector", None)
        if fn is not None:
            return np.asarray(fn(theta), dtype=float)
        one = getattr(self.model, name)
        return np.array([one(theta, j) for j in range(self.q)])

    def _penalty_vectors(self, theta):
        sm = self.smoother
        g = np.zeros(self.q)
        h = np.zeros(self.q)
        if self.penalty.mode is Mode.FUSION:
            if self.q > 1:
                order = np.argsort(theta, kind="stable")
                gaps = np.diff(theta[order])
                d1 = sm.deriv1(gaps)
                d2 = sm.deriv2(gaps)
                gs = np.zeros(self.q)
                hs = np.zeros(self.q)
                gs[1:] -= d1
                gs[:-1] += d1
                hs[1:] -= d2
                hs[:-1] -= d2
                g[order] = gs
                h[order] = hs
        else:
            mask = self.penalized
            g[mask] = -sm.deriv1(theta[mask])
            h[mask] = -sm.deriv2(theta[mask])
        return g, h

    def gradient(self, theta) -> np.ndarray:
        """All coordinate gradients at once."""
        theta = self._theta(theta)
        pg, _ = self._penalty_vectors(theta)
        return -2.0 * self._model_vector("score", theta) + self.c * pg

    def hess_diagonal(self, theta) -> np.ndarray:
        theta = self._theta(theta)
        _, ph = self._penalty_vectors(theta)
        return 2.0 * self._model_vector("info", theta) + self.c * ph

    def coordinate_slice(self, theta, j: int):
        """Univariate view of the objective along coordinate ``j``.

        Returns ``(phi, dphi)`` where ``phi(t)`` is the objective with
        ``theta[j] = t`` and ``dphi(t)`` its first and second derivative in
        ``t``. The other coordinates are frozen at their current values.
        """
        theta = self._theta(theta).copy()
        self._check_j(j)
        model, sm, c, q = self.model, self.smoother, self.c, self.q
        work = theta

        if self.penalty.mode is Mode.ZERO:
            pen = bool(self.penalized[j])
            mask = self.penalized.copy()
            mask[j] = False
            rest = q - float(np.sum(sm.value(theta[mask])))

            def phi(t):
                work[j] = t
                return -2.0 * model.loglik(work) + c * (rest - (sm.value(t) if pen else 0.0))

            def dphi(t):
                work[j] = t
                g = -2.0 * model.score(work, j)
                h = 2.0 * model.info(work, j)
                if pen:
                    g -= c * sm.deriv1(t)
                    h -= c * sm.deriv2(t)
                return g, h

            return phi, dphi

        others = np.sort(np.delete(theta, j)).tolist()
        total = float(np.sum(sm.value(np.diff(others)))) if len(others) > 1 else 0.0

        def neighbors(t):
            i = bisect.bisect_left(others, t)
            return (others[i - 1] if i > 0 else None), (others[i] if i < len(others) else None)

        def phi(t):
            work[j] = t
            lo, hi = neighbors(t)
            s = total
            if lo is not None and hi is not None:
                s -= sm.value(hi - lo)
            if lo is not None:
                s += sm.value(t - lo)
            if hi is not None:
                s += sm.value(hi - t)
            return -2.0 * model.loglik(work) + c * (q - s)

        def dphi(t):
            work[j] = t
            lo, hi = neighbors(t)
            g = -2.0 * model.score(work, j)
            h = 2.0 * model.info(work, j)
            if lo is not None:
                g -= c * sm.deriv1(t - lo)
                h -= c * sm.deriv2(t - lo)
            if hi is not None:
                g += c * sm.deriv1(hi - t)
                h -= c * sm.deriv2(hi - t)
            return g, h

        return phi, dphi


def surrogate_ic(o: SurrogateObjective, theta) -> float:
    return o.value(theta)


def surrogate_ic_grad(o: SurrogateObjective, theta, j: int) -> float:
    return o.grad(theta, j)


def surrogate_ic_hess_diag(o: SurrogateObjective, theta, j: int) -> float:
    return o.hess_diag(theta, j)
