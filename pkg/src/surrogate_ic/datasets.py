"""Bundled and synthetic data sets."""

from __future__ import annotations

import csv
from importlib import resources

import numpy as np

__all__ = ["TOY_SEED", "load_faithful_subset", "make_regression_toy", "faithful_subset_path"]

TOY_SEED = 20240517


def faithful_subset_path():
    return resources.files("surrogate_ic") / "data" / "faithful_subset.csv"


def load_faithful_subset() -> tuple[np.ndarray, list[str]]:
    """Every fifth Old Faithful observation: ``(X, ["eruptions", "waiting"])``."""
    with faithful_subset_path().open("r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return np.array(rows[1:], dtype=float), rows[0]


def make_regression_toy(n: int = 30, z: float = 1.0, seed: int = TOY_SEED):
    """Simple regression where the slope is real but not worth an AIC parameter.

    The predictor is centred and the residuals are orthogonal to
    ``[1, x]`` and rescaled so that the full-model noise variance estimate is
    exactly 1. The slope is then set so its z-statistic equals ``z``; for
    ``0 < z**2 < 2`` the intercept-only model has the lower AIC, by
    ``2 - z**2``.

    Returns
    -------
    x, y : ndarray of shape (n,)
    """
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    x -= x.mean()
    design = np.column_stack([np.ones(n), x])
    r = rng.normal(size=n)
    r -= design @ np.linalg.lstsq(design, r, rcond=None)[0]
    r *= np.sqrt(n / (r @ r))
    slope = z / np.sqrt(x @ x)
    return x, 1.0 + slope * x + r
