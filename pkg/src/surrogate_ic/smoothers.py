"""Smooth approximants of the indicator ``I(x == 0)``.

Each family peaks at one at the origin and decays to zero elsewhere as the
sharpness ``k`` grows, so ``value`` converges pointwise to the indicator.
First and second derivatives are closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import math

import numpy as np

__all__ = ["DomainError", "Family", "Smoother", "value", "deriv1", "deriv2"]


class DomainError(ValueError):
    """Raised when a smoother is evaluated at a non-finite point."""


class Family(str, Enum):
    SECH = "sech"
    GAUSSIAN = "gaussian"
    RATIONAL = "rational"


def _check_finite(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("smoother argument must be finite")
    return arr


def _sech(z):
    # written with exp(-|z|) so large |z| underflows to 0 instead of overflowing
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)


def _out(arr, x):
    return float(arr) if np.ndim(x) == 0 else arr


def _scalar(x):
    if isinstance(x, (float, int)) and not isinstance(x, bool):
        if not math.isfinite(x):
            raise DomainError("smoother argument must be finite")
        return True
    return False


def _sech1(z):
    e = math.exp(-abs(z))
    return 2.0 * e / (1.0 + e * e)


# Each family is g(k x) for a fixed profile g with g(0) = 1, so the width of
# every family is 1/k. Derivatives in x are k * g'(kx) and k**2 * g''(kx).


def _profile_scalar(family, z, order):
    if family is Family.SECH:
        sv = _sech1(z)
        if order == 0:
            return sv
        tv = math.tanh(z)
        return -sv * tv if order == 1 else sv * (tv * tv - sv * sv)
    if family is Family.GAUSSIAN:
        g = math.exp(-0.5 * z * z)
        return g if order == 0 else (-z * g if order == 1 else (z * z - 1.0) * g)
    v = 1.0 / (1.0 + z * z)
    if order == 0:
        return v * v
    return -4.0 * z * v**3 if order == 1 else (20.0 * z * z - 4.0) * v**4


def _profile_array(family, z, order):
    if family is Family.SECH:
        sv = _sech(z)
        if order == 0:
            return sv
        tv = np.tanh(z)
        return -sv * tv if order == 1 else sv * (tv * tv - sv * sv)
    if family is Family.GAUSSIAN:
        g = np.exp(-0.5 * z * z)
        return g if order == 0 else (-z * g if order == 1 else (z * z - 1.0) * g)
    v = 1.0 / (1.0 + z * z)
    if order == 0:
        return v * v
    return -4.0 * z * v**3 if order == 1 else (20.0 * z * z - 4.0) * v**4


@dataclass(frozen=True)
class Smoother:
    """A delta-approximant family together with its sharpness ``k``.

    Parameters
    ----------
    family : {"sech", "gaussian", "rational"}
        ``sech(kx)``, ``exp(-(kx)**2 / 2)`` or ``(1 + (kx)**2)**-2``.
    k : float
        Sharpness, strictly positive. Every family has width ``1/k``.
    """

    family: Family
    k: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        k = float(self.k)
        if not np.isfinite(k) or k <= 0:
            raise ValueError(f"sharpness k must be positive and finite, got {self.k!r}")
        object.__setattr__(self, "k", k)

    def with_k(self, k: float) -> "Smoother":
        return Smoother(self.family, k)

    def _eval(self, x, order):
        scale = self.k**order
        if _scalar(x):
            return scale * _profile_scalar(self.family, self.k * x, order)
        arr = _check_finite(x)
        return _out(scale * _profile_array(self.family, self.k * arr, order), x)

    def value(self, x):
        """Smoother value, in ``(0, 1]`` (exactly 0 only after underflow)."""
        return self._eval(x, 0)

    def deriv1(self, x):
        return self._eval(x, 1)

    def deriv2(self, x):
        return self._eval(x, 2)


def value(s: Smoother, x):
    return s.value(x)


def deriv1(s: Smoother, x):
    return s.deriv1(x)


def deriv2(s: Smoother, x):
    return s.deriv2(x)
