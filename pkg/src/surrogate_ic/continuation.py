"""Annealed continuation over the smoother sharpness ``k``.

For each ``k`` of an increasing geometric schedule the surrogate criterion is
minimized by cyclic univariate root solves of its coordinate gradients,
warm-started at the previous optimum. After the last ``k`` the estimate is
snapped to a discrete pattern (a zero pattern or a set of fused groups) and
refit exactly under that pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .models import LikelihoodModel
from .objective import Mode, PenaltySpec, SurrogateObjective, exact_ic
from .rootfind import DifferentiableTarget, RootSolveReport, solve_root

__all__ = [
    "ContinuationError",
    "ContinuationSchedule",
    "PathRecord",
    "SolutionPath",
    "continuation_solve",
    "snap_pattern",
    "polish",
    "pattern_count",
]

# gap * k below which adjacent fused values are also moved as one block
_BLOCK_GAP = 0.5
_JUMP_FACTOR = 10.0


class ContinuationError(RuntimeError):
    """The continuation produced non-finite parameters.

    ``path`` holds the records computed before the failure.
    """

    def __init__(self, message, path):
        super().__init__(message)
        self.path = path


@dataclass(frozen=True)
class ContinuationSchedule:
    """Geometric schedule ``k0, k0*ratio, ...`` capped by ``k_max``.

    ``inner_tol`` bounds the largest coordinate gradient at each ``k`` and
    ``inner_max_iter`` the number of coordinate sweeps spent reaching it.
    """

    k0: float
    k_max: float
    ratio: float = 1.25
    inner_tol: float = 1e-6
    inner_max_iter: int = 200
    series_order: int = 3

    def __post_init__(self):
        if not (self.k0 > 0 and self.k_max > 0):
            raise ValueError("k0 and k_max must be positive")
        if self.k0 > self.k_max:
            raise ValueError("k0 must not exceed k_max")
        if not self.ratio > 1:
            raise ValueError("ratio must exceed 1")
        if not self.inner_tol > 0:
            raise ValueError("inner_tol must be positive")
        if int(self.inner_max_iter) < 1 or int(self.series_order) < 1:
            raise ValueError("inner_max_iter and series_order must be at least 1")

    @classmethod
    def for_scale(cls, scale: float, **overrides) -> "ContinuationSchedule":
        """Defaults for parameters that vary on the order of ``scale``."""
        params = dict(k0=0.5 / scale, k_max=1e4 / scale, inner_tol=1e-6 / scale)
        params.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**params)

    def ks(self) -> list[float]:
        out = []
        k = float(self.k0)
        while k < self.k_max * (1 - 1e-12):
            out.append(k)
            k *= self.ratio
        out.append(float(self.k_max))
        return out


@dataclass(frozen=True)
class PathRecord:
    """The surrogate optimum found at one sharpness ``k``."""

    k: float
    theta: tuple[float, ...]
    objective: float
    count: float
    grad_norm: float
    converged: bool
    sweeps: int
    jump: bool = False
    reports: tuple[RootSolveReport, ...] = field(default=(), compare=False, repr=False)

    @property
    def theta_array(self) -> np.ndarray:
        return np.array(self.theta)


@dataclass
class SolutionPath:
    """Records of one continuation run plus its snapped and refit terminus.

    ``pattern`` is a support mask (zero mode) or group labels (fusion mode).
    """

    mode: Mode
    records: list[PathRecord]
    pattern: np.ndarray | None = None
    polished_theta: np.ndarray | None = None
    polished_ic: float | None = None
    snap_tol: float | None = None

    @property
    def terminal(self) -> PathRecord:
        return self.records[-1]

    @property
    def converged(self) -> bool:
        return bool(self.records) and self.records[-1].converged

    @property
    def ks(self) -> np.ndarray:
        return np.array([r.k for r in self.records])

    @property
    def thetas(self) -> np.ndarray:
        return np.array([r.theta for r in self.records])


def snap_pattern(theta, mode, tol: float, penalized=None) -> np.ndarray:
    """Discrete pattern implied by ``theta``.

    Zero mode returns the support mask ``|theta_j| > tol`` (unpenalized
    coordinates are always in). Fusion mode returns group labels numbered by
    increasing value, where a group is a run of sorted values whose adjacent
    gaps are at most ``tol``.
    """
    if not tol > 0:
        raise ValueError("snap tolerance must be positive")
    theta = np.asarray(theta, dtype=float)
    if Mode(mode) is Mode.ZERO:
        support = np.abs(theta) > tol
        if penalized is not None:
            support |= ~np.asarray(penalized, bool)
        return support
    order = np.argsort(theta, kind="stable")
    labels = np.empty(theta.size, dtype=int)
    if theta.size == 0:
        return labels
    breaks = np.concatenate([[0], np.cumsum(np.diff(theta[order]) > tol)])
    labels[order] = breaks
    return labels


def pattern_count(pattern, mode) -> int:
    pattern = np.asarray(pattern)
    if Mode(mode) is Mode.ZERO:
        return int(np.count_nonzero(pattern))
    return int(np.unique(pattern).size)


def polish(model: LikelihoodModel, pattern, mode, ic_weight: float):
    """Exact refit under ``pattern``; returns ``(theta, ic)``."""
    theta = model.refit(pattern)
    return theta, exact_ic(model, theta, ic_weight, pattern_count(pattern, mode))


class _Stepper:
    """Coordinate and fused-run updates for one surrogate objective."""

    def __init__(self, obj: SurrogateObjective, order: int, tol: float):
        self.obj = obj
        self.order = order
        self.tol = tol
        self.fd_step = 1e-3 / obj.k
        self.fusion = obj.penalty.mode is Mode.FUSION

    @staticmethod
    def _accept(f_old, f_new):
        return math.isfinite(f_new) and f_new <= f_old + 1e-12 * max(1.0, abs(f_old))

    def _minimize_1d(self, phi, dphi, t0, f0):
        """Minimize a univariate slice from ``t0`` (where it equals ``f0``).

        The root of the slope is sought with the inversion series; a result
        that is not a local minimum or raises the value is replaced by a
        backtracking descent. Returns ``(t, value, report)``.
        """
        g0, h0 = dphi(t0)
        if abs(g0) < 0.1 * self.tol:
            return t0, f0, None
        report = None
        if h0 > 0:
            target = DifferentiableTarget(dphi, max_order=self.order, step=self.fd_step)
            report = solve_root(target, t0, self.order, tol=0.1 * self.tol, max_iter=25)
            t1 = report.root_estimate
            if math.isfinite(t1) and dphi(t1)[1] > 0:
                f1 = phi(t1)
                if self._accept(f0, f1):
                    return t1, f1, report
        t, f, g, h = t0, f0, g0, h0
        for _ in range(50):
            if abs(g) < 0.1 * self.tol:
                break
            step = -g / abs(h) if abs(h) > 1e-300 else -g
            moved = False
            for _ in range(40):
                cand = t + step
                if math.isfinite(cand):
                    fc = phi(cand)
                    if math.isfinite(fc) and fc < f - 1e-4 * abs(step * g):
                        t, f, moved = cand, fc, True
                        break
                step *= 0.5
            if not moved:
                break
            g, h = dphi(t)
        return t, f, report

    def coordinate(self, theta, j, f0):
        phi, dphi = self.obj.coordinate_slice(theta, j)
        t, f, report = self._minimize_1d(phi, dphi, float(theta[j]), f0)
        theta[j] = t
        return f, report

    def fused_runs(self, theta):
        """Sorted runs whose adjacent gaps sit inside the smoother's core."""
        order = np.argsort(theta, kind="stable")
        close = np.diff(theta[order]) * self.obj.k <= _BLOCK_GAP
        runs, start = [], 0
        for i, c in enumerate(close):
            if not c:
                if i > start:
                    runs.append(order[start : i + 1])
                start = i + 1
        if len(order) - 1 > start:
            runs.append(order[start:])
        return runs

    def run_newton(self, theta, run, f0):
        """Newton iterations on the members of one fused run.

        Within a run the penalty couples only sorted neighbours, so the
        Hessian is tridiagonal: ``c * d''(gap)`` off the diagonal. The model
        part is taken as diagonal (its coordinate information).
        """
        obj = self.obj
        sm, c = obj.smoother, obj.c
        f = f0
        for _ in range(20):
            g_all = obj.gradient(theta)
            g = g_all[run]
            if np.max(np.abs(g)) < 0.1 * self.tol:
                break
            H = np.diag(obj.hess_diagonal(theta)[run])
            off = c * sm.deriv2(np.diff(theta[run]))
            H[np.arange(len(run) - 1), np.arange(1, len(run))] = off
            H[np.arange(1, len(run)), np.arange(len(run) - 1)] = off
            try:
                np.linalg.cholesky(H)
            except np.linalg.LinAlgError:
                break
            step = -np.linalg.solve(H, g)
            base = theta[run].copy()
            moved = False
            lam = 1.0
            for _ in range(30):
                theta[run] = base + lam * step
                fc = obj.value(theta)
                if fc < f - 1e-4 * lam * abs(float(step @ g)) or (lam == 1.0 and self._accept(f, fc)):
                    f, moved = fc, True
                    break
                lam *= 0.5
            if not moved:
                theta[run] = base
                break
        return f


def _solve_at_k(obj, theta, sched):
    stepper = _Stepper(obj, int(sched.series_order), sched.inner_tol)
    f = obj.value(theta)
    reports = [None] * theta.size
    grad = obj.gradient(theta)
    sweeps = 0
    while np.max(np.abs(grad)) > sched.inner_tol and sweeps < sched.inner_max_iter:
        sweeps += 1
        for j in range(theta.size):
            f, rep = stepper.coordinate(theta, j, f)
            if rep is not None:
                reports[j] = rep
        if stepper.fusion:
            for run in stepper.fused_runs(theta):
                f = stepper.run_newton(theta, run, f)
        if not np.all(np.isfinite(theta)):
            break
        grad = obj.gradient(theta)
    gnorm = float(np.max(np.abs(grad)))
    return f, gnorm, sweeps, tuple(r for r in reports if r is not None)


def _flag_jumps(records):
    if len(records) < 3:
        return records
    steps = np.array(
        [np.max(np.abs(np.subtract(b.theta, a.theta))) for a, b in zip(records, records[1:])]
    )
    med = float(np.median(steps))
    if med <= 0:
        return records
    out = [records[0]]
    for rec, st in zip(records[1:], steps):
        out.append(replace(rec, jump=bool(st > _JUMP_FACTOR * med)))
    return out


def continuation_solve(
    model: LikelihoodModel,
    penalty: PenaltySpec,
    sched: ContinuationSchedule,
    theta0: Sequence[float],
    snap_tol: float | None = None,
    penalized=None,
) -> SolutionPath:
    """Follow surrogate optima from ``theta0`` along the ``k`` schedule.

    Parameters
    ----------
    model : LikelihoodModel
    penalty : PenaltySpec
    sched : ContinuationSchedule
    theta0 : sequence of float
        Seed for the first surrogate.
    snap_tol : float, optional
        Tolerance for extracting the terminal pattern. When omitted the
        path is returned without a pattern or refit.
    penalized : array of bool, optional
        Zero mode only; see :class:`SurrogateObjective`.

    Returns
    -------
    SolutionPath
    """
    theta = np.array(theta0, dtype=float)
    if theta.shape != (model.q,):
        raise ValueError(f"seed must have length {model.q}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("seed must be finite")
    obj = SurrogateObjective(model, penalty, sched.k0, penalized)
    path = SolutionPath(penalty.mode, [], snap_tol=snap_tol)
    for k in sched.ks():
        obj = obj.with_k(k)
        f, gnorm, sweeps, reports = _solve_at_k(obj, theta, sched)
        if not np.all(np.isfinite(theta)) or not math.isfinite(f):
            path.records = _flag_jumps(path.records)
            raise ContinuationError(f"non-finite iterate at k={k:.6g}", path)
        path.records.append(
            PathRecord(
                k=float(k),
                theta=tuple(float(v) for v in theta),
                objective=float(f),
                count=float(obj.count(theta)),
                grad_norm=gnorm,
                converged=bool(gnorm <= sched.inner_tol),
                sweeps=sweeps,
                reports=reports,
            )
        )
    path.records = _flag_jumps(path.records)
    if snap_tol is not None:
        pattern = snap_pattern(theta, penalty.mode, snap_tol, obj.penalized if penalty.mode is Mode.ZERO else None)
        path.pattern = pattern
        path.polished_theta, path.polished_ic = polish(model, pattern, penalty.mode, penalty.ic_weight)
    return path
