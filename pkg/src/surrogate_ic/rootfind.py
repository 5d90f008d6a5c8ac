"""Univariate root finding with truncated Lagrange inversion series.

The root of ``f`` near a seed ``a`` is the inverse function ``g = f^{-1}``
evaluated at zero. Expanding ``g`` in a Taylor series about ``y = f(a)`` gives

    A = a + sum_i (-f(a))**i / i! * g^(i)(f(a)),
    g^(i) = [(1 / f'(x)) d/dx]^(i-1) (1 / f'(x)),

whose first term is the Newton step. Truncating after ``order`` terms leaves
an error of ``o(|f(a)|**order)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "EPS_DERIV",
    "DerivativeTooSmall",
    "SeriesDiverged",
    "DifferentiableTarget",
    "Method",
    "RootSolveReport",
    "lagrange_step",
    "rescale",
    "solve_root",
]

EPS_DERIV = 1e-12
MAX_HALVINGS = 30


class DerivativeTooSmall(ArithmeticError):
    """``|f'(a)|`` is too small for a series or Newton step."""


class SeriesDiverged(ArithmeticError):
    """A series term evaluated to a non-finite number."""


@dataclass(frozen=True)
class DifferentiableTarget:
    """A scalar function with its leading derivatives.

    Parameters
    ----------
    func : callable
        ``func(x)`` returns ``(f(x), f_1(x), ..., f_m(x))`` with ``m >= 1``
        analytic derivatives.
    max_order : int
        Highest series order the target supports. Derivatives beyond the
        ``m`` analytic ones are completed by central differences of ``f_m``.
    step : float
        Absolute step for the finite-difference completion.
    """

    func: Callable[[float], Sequence[float]]
    max_order: int = 3
    step: float = 1e-4

    def __post_init__(self):
        if int(self.max_order) < 1:
            raise ValueError("max_order must be at least 1")
        if not self.step > 0:
            raise ValueError("finite-difference step must be positive")

    def value(self, x: float) -> float:
        return float(self.func(x)[0])

    def derivatives(self, x: float, order: int) -> tuple[np.ndarray, bool]:
        """Return ``[f, f_1, ..., f_order]`` at ``x`` and whether any entry
        came from finite differences."""
        vals = np.asarray(self.func(x), dtype=float)
        m = len(vals) - 1
        if m < 1:
            raise ValueError("target must supply at least f and f'")
        if order <= m:
            return vals[: order + 1], False
        h = self.step
        out = list(vals)
        for r in range(1, order - m + 1):
            # r-th central difference of the highest analytic derivative
            acc = 0.0
            for i in range(r + 1):
                xi = x + (r / 2.0 - i) * h
                acc += (-1) ** i * math.comb(r, i) * float(self.func(xi)[m])
            out.append(acc / h**r)
        return np.asarray(out), True


def rescale(t: DifferentiableTarget, c_a: float) -> DifferentiableTarget:
    """Multiply ``f`` and every derivative by ``c_a``; roots are unchanged."""
    c_a = float(c_a)
    if c_a == 0.0 or not np.isfinite(c_a):
        raise ValueError("scaling constant must be finite and non-zero")
    if c_a == 1.0:
        return t
    inner = t.func

    def scaled(x):
        return tuple(c_a * v for v in inner(x))

    return DifferentiableTarget(scaled, t.max_order, t.step)


def _inverse_derivatives(derivs: np.ndarray, order: int) -> list[float]:
    """Derivatives ``g^(1..order)`` of the local inverse at ``f(a)``.

    Works on truncated Taylor coefficients in ``s = x - a``. ``derivs`` holds
    ``f, f_1, ..., f_order``.
    """
    # jet of f' about a: coefficient m is f_{m+1} / m!
    n = order
    fp = np.array([derivs[m + 1] / math.factorial(m) for m in range(n)])
    inv = np.zeros(n)
    inv[0] = 1.0 / fp[0]
    for m in range(1, n):
        inv[m] = -np.dot(fp[1 : m + 1], inv[m - 1 :: -1][:m]) / fp[0]
    out = [inv[0]]
    cur = inv.copy()
    for _ in range(1, n):
        d = np.array([(m + 1) * cur[m + 1] for m in range(len(cur) - 1)])
        cur = np.convolve(inv[: len(d)], d)[: len(d)]
        out.append(cur[0])
    return out


def lagrange_step(t: DifferentiableTarget, a: float, order: int = 3) -> float:
    """Order-``order`` truncated inversion series for the root, seeded at ``a``.

    Order 1 is exactly the Newton step ``a - f(a)/f'(a)``.
    """
    order = int(order)
    if order < 1 or order > t.max_order:
        raise ValueError(f"order must lie in [1, {t.max_order}], got {order}")
    derivs, _ = t.derivatives(a, order)
    f, f1 = derivs[0], derivs[1]
    if not np.isfinite(f1) or abs(f1) <= EPS_DERIV:
        raise DerivativeTooSmall(f"|f'({a!r})| = {abs(f1):.3g}")
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        r = f / f1
        est = a - r
        if order >= 2:
            f2 = derivs[2]
            est -= 0.5 * f2 * r * r / f1
        if order >= 3:
            f3 = derivs[3]
            est -= (3.0 * f2 * f2 - f1 * f3) * r**3 / (6.0 * f1 * f1)
        if order > 3:
            g = _inverse_derivatives(derivs, order)
            for i in range(4, order + 1):
                est += (-f) ** i / math.factorial(i) * g[i - 1]
    if not np.isfinite(est):
        raise SeriesDiverged(f"non-finite series estimate from seed {a!r}")
    return float(est)


class Method(str, Enum):
    LAGRANGE = "lagrange"
    NEWTON = "newton"


@dataclass(frozen=True)
class RootSolveReport:
    root_estimate: float
    iterations: int
    final_residual: float
    method_used: Method
    converged: bool
    approximate_derivatives: bool = field(default=False, compare=False)


def _damped_newton(t, x, fx):
    derivs, _ = t.derivatives(x, 1)
    f1 = derivs[1]
    if not np.isfinite(f1) or abs(f1) <= EPS_DERIV:
        return None
    step = -fx / f1
    lam = 1.0
    for _ in range(MAX_HALVINGS + 1):
        cand = x + lam * step
        fc = t.value(cand)
        if np.isfinite(fc) and abs(fc) < abs(fx):
            return cand, fc
        lam *= 0.5
    return None


def solve_root(
    t: DifferentiableTarget,
    seed: float,
    order: int = 3,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> RootSolveReport:
    """Iterate series steps from ``seed`` until ``|f| < tol``.

    A series step is kept only when it lowers ``|f|``; otherwise a damped
    Newton step (at most 30 halvings) is tried. Accepted iterates therefore
    have strictly decreasing residuals, except that a point where ``f'``
    vanishes is first moved by a relative ``1e-8``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if int(max_iter) < 1:
        raise ValueError("max_iter must be at least 1")
    order = min(int(order), t.max_order)
    x = float(seed)
    vals = t.func(x)
    fx = float(vals[0])
    method = Method.LAGRANGE
    approx = order > len(vals) - 1
    if not np.isfinite(fx):
        return RootSolveReport(x, 0, float("inf"), method, False, approx)
    it = 0
    while abs(fx) >= tol and it < max_iter:
        it += 1
        cand = None
        try:
            cand = lagrange_step(t, x, order)
        except DerivativeTooSmall:
            nudged = x + 1e-8 * max(1.0, abs(x))
            fn = t.value(nudged)
            try:
                cand = lagrange_step(t, nudged, order)
            except (DerivativeTooSmall, SeriesDiverged):
                return RootSolveReport(x, it, abs(fx), method, False, approx)
            if np.isfinite(fn):
                # continue from the perturbed point so the fallback has a slope
                x, fx = nudged, fn
        except SeriesDiverged:
            cand = None
        if cand is not None:
            fc = t.value(cand)
            if np.isfinite(fc) and abs(fc) < abs(fx):
                x, fx, method = cand, fc, Method.LAGRANGE
                continue
        damped = _damped_newton(t, x, fx)
        if damped is None:
            break
        x, fx = damped
        method = Method.NEWTON
    res = abs(fx)
    return RootSolveReport(x, it, res, method, bool(res < tol), approx)
