"""Small parameter checks shared by the estimators and the CLI."""

from __future__ import annotations

import math

import numpy as np

from .smoothers import Family


def check_positive(value, name):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a number, got {value!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return v


def check_smoother(name):
    try:
        return Family(name)
    except ValueError:
        choices = ", ".join(f.value for f in Family)
        raise ValueError(f"unknown smoother {name!r}; choose one of {choices}") from None


def check_seed_spec(seeds):
    """Normalize a seed list: names ``"ols"``/``"zero"`` or numeric vectors."""
    if isinstance(seeds, str) or (isinstance(seeds, np.ndarray) and seeds.ndim == 1):
        seeds = [seeds]
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    out = []
    for s in seeds:
        if isinstance(s, str):
            if s not in ("ols", "zero"):
                raise ValueError(f"unknown seed {s!r}; use 'ols', 'zero' or a vector")
            out.append(s)
        else:
            vec = np.asarray(s, dtype=float).ravel()
            if not np.all(np.isfinite(vec)):
                raise ValueError("seed vectors must be finite")
            out.append(vec)
    return out
