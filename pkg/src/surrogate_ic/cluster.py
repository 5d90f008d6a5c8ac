"""Combine per-coordinate fused groups into multivariate clusters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ClusterAssignment", "canonical_labels", "extract_clusters"]


def canonical_labels(labels) -> np.ndarray:
    """Renumber labels ``0, 1, ...`` in order of first appearance.

    Works on 1-D label vectors and on 2-D arrays whose rows are label tuples.
    """
    arr = np.asarray(labels)
    keys = [tuple(r) for r in arr] if arr.ndim == 2 else arr.tolist()
    seen: dict = {}
    return np.array([seen.setdefault(key, len(seen)) for key in keys], dtype=int)


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Cluster labels for ``n`` observations described by ``D`` coordinates.

    Attributes
    ----------
    per_coordinate_labels : ndarray of shape (n, D)
        Fused-group label of each observation in each coordinate.
    merged_labels : ndarray of shape (n,)
        Equal exactly when all ``D`` coordinate labels are equal, numbered by
        first appearance.
    split_flags : ndarray of shape (n,)
        Observations whose label combination is unique although every
        coordinate label is shared with other observations.
    """

    per_coordinate_labels: np.ndarray
    merged_labels: np.ndarray
    split_flags: np.ndarray

    @property
    def n_groups(self) -> int:
        return int(np.unique(self.merged_labels).size)

    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.merged_labels)


def extract_clusters(patterns, n: int | None = None, d: int | None = None) -> ClusterAssignment:
    """Merge univariate fused groups into multivariate clusters.

    Parameters
    ----------
    patterns : sequence of label vectors, or array of shape (n, D)
        One label vector per coordinate. A 2-D array is read column-wise.
    n, d : int, optional
        Expected number of observations and coordinates; checked if given.
    """
    if isinstance(patterns, np.ndarray) and patterns.ndim == 2:
        labels = patterns.astype(int, copy=True)
    else:
        cols = [np.asarray(p).ravel() for p in patterns]
        if not cols:
            raise ValueError("need at least one coordinate")
        if len({c.size for c in cols}) != 1:
            raise ValueError("every coordinate must label the same observations")
        labels = np.column_stack(cols).astype(int)
    if n is not None and labels.shape[0] != n:
        raise ValueError(f"expected {n} observations, got {labels.shape[0]}")
    if d is not None and labels.shape[1] != d:
        raise ValueError(f"expected {d} coordinates, got {labels.shape[1]}")
    merged = canonical_labels(labels)
    merged_size = np.bincount(merged)[merged]
    shared = np.ones(labels.shape[0], dtype=bool)
    for col in labels.T:
        _, inv, counts = np.unique(col, return_inverse=True, return_counts=True)
        shared &= counts[inv] >= 2
    split = (merged_size == 1) & shared
    return ClusterAssignment(labels, merged, split)
