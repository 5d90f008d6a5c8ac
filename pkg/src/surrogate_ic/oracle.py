"""Brute-force reference solutions for small problems.

``exhaustive_subset_ic`` refits every zero pattern of a regression and
``exhaustive_partition_ic`` every set partition of a Gaussian-means problem.
Both exist to certify the continuation results, not for speed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .models import GaussMeansData, LinRegData

__all__ = [
    "MAX_SUBSET_Q",
    "MAX_PARTITION_N",
    "OracleTooLarge",
    "SubsetResult",
    "PartitionResult",
    "restricted_growth_strings",
    "bell_number",
    "exhaustive_subset_ic",
    "exhaustive_partition_ic",
    "partition_ic",
]

MAX_SUBSET_Q = 20
MAX_PARTITION_N = 10


class OracleTooLarge(ValueError):
    """The requested enumeration exceeds the size guard."""


@dataclass(frozen=True)
class SubsetResult:
    """Exhaustive zero-pattern search result.

    ``table`` holds ``(support mask, p, ic)`` rows in enumeration order; the
    first row is the null pattern.
    """

    best_support: np.ndarray
    best_ic: float
    best_theta: np.ndarray
    table: list[tuple[np.ndarray, int, float]]


@dataclass(frozen=True)
class PartitionResult:
    """Exhaustive partition search result.

    ``table`` holds ``(labels, groups, ic)`` rows in restricted-growth order.
    """

    best_labels: np.ndarray
    best_ic: float
    table: list[tuple[np.ndarray, int, float]]


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """All set partitions of ``range(n)`` as restricted growth strings.

    ``a[0] == 0`` and ``a[i] <= 1 + max(a[:i])``; emitted in lexicographic
    order.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        yield ()
        return
    a = [0] * n
    m = [0] * n  # m[i] = max(a[:i+1])
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] == m[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = m[i]


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def exhaustive_subset_ic(d: LinRegData, c_n: float, penalized=None) -> SubsetResult:
    """Refit every subset of the penalized columns and score it.

    Unpenalized columns (by default the intercept) are always kept. Ties go
    to the smaller model, then to the lexicographically smaller pattern.
    """
    mask = d.default_penalized() if penalized is None else np.asarray(penalized, bool)
    free = np.flatnonzero(mask)
    if free.size > MAX_SUBSET_Q:
        raise OracleTooLarge(
            f"{free.size} penalized columns means 2**{free.size} refits; "
            f"the oracle is limited to {MAX_SUBSET_Q}. Use the continuation solver instead."
        )
    table = []
    best = None
    for bits in itertools.product((False, True), repeat=free.size):
        support = ~mask.copy()
        support[free] = bits
        theta = d.refit(support)
        p = int(support.sum())
        ic = -2.0 * d.loglik(theta) + c_n * p
        table.append((support, p, ic))
        key = (ic, p, tuple(int(b) for b in support))
        if best is None or key < best[0]:
            best = (key, support, theta)
    _, support, theta = best
    return SubsetResult(support, best[0][0], theta, table)


def partition_ic(d: GaussMeansData, labels, c_n: float) -> float:
    labels = np.asarray(labels)
    mu = d.refit(labels)
    return -2.0 * d.loglik(mu) + c_n * np.unique(labels).size


def exhaustive_partition_ic(d: GaussMeansData, c_n: float) -> PartitionResult:
    """Score every set partition of the observations.

    Group means are the within-group sample means. Ties go to fewer groups,
    then to the earlier restricted growth string.
    """
    n = d.n
    if n > MAX_PARTITION_N:
        raise OracleTooLarge(
            f"n = {n} gives Bell({n}) = {bell_number(n)} partitions; "
            f"the oracle is limited to n <= {MAX_PARTITION_N}"
        )
    y = d.y
    s2 = d.sigma**2
    const = n * (np.log(2.0 * np.pi) + np.log(s2))
    table = []
    best = None
    for rgs in restricted_growth_strings(n):
        labels = np.array(rgs)
        groups = int(labels.max()) + 1
        sums = np.bincount(labels, weights=y, minlength=groups)
        counts = np.bincount(labels, minlength=groups)
        resid = y - (sums / counts)[labels]
        ic = const + float(resid @ resid) / s2 + c_n * groups
        table.append((labels, groups, ic))
        key = (ic, groups)
        if best is None or key < best[0]:
            best = (key, labels)
    return PartitionResult(best[1], best[0][0], table)
