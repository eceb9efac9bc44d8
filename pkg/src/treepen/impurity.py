"""Node summary statistics and impurity functions.

All functions accept either scalar statistics or broadcastable numpy arrays
of statistics, which is how the split scanner evaluates every candidate
threshold of a feature in one pass.

Sign convention: lower impurity is always the more desirable node. For the
extremes criteria this means the high-means impurity is ``-mean``, the
low-means impurity is ``+mean`` and the class-extreme impurity is
``-p[class_of_interest]``, so that minimizing over children isolates the
child with the highest mean (resp. lowest mean, highest proportion).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any

import numpy as np

from treepen.dataset import RowSet
from treepen.errors import KindMismatch


class EmptyNode(ValueError):
    pass


class ImpurityKind(enum.Enum):
    VARIANCE = "variance"
    GINI = "gini"
    CROSS_ENTROPY = "entropy"
    HIGH_MEANS = "high-means"
    LOW_MEANS = "low-means"
    CLASS_EXTREME = "class-extreme"

    @property
    def for_classification(self) -> bool:
        return self in (ImpurityKind.GINI, ImpurityKind.CROSS_ENTROPY, ImpurityKind.CLASS_EXTREME)


@dataclass(frozen=True)
class NodeStats:
    """Sufficient statistics of the targets in a node.

    Regression nodes carry ``total``, ``total_sq``, ``y_min`` and ``y_max``;
    classification nodes carry per-class ``counts`` (last axis = class).
    """

    n: Any
    total: Any = None
    total_sq: Any = None
    y_min: Any = None
    y_max: Any = None
    counts: Any = None

    @property
    def is_classification(self) -> bool:
        return self.counts is not None

    @property
    def mean(self):
        return self.total / self.n

    @property
    def proportions(self):
        return np.asarray(self.counts) / np.asarray(self.n)[..., None]

    @classmethod
    def regression(cls, y) -> NodeStats:
        y = np.asarray(y, dtype=np.float64)
        if y.size == 0:
            raise EmptyNode("node has no rows")
        return cls(n=y.size, total=float(y.sum()), total_sq=float(np.dot(y, y)),
                   y_min=float(y.min()), y_max=float(y.max()))

    @classmethod
    def classification(cls, y, n_classes: int) -> NodeStats:
        y = np.asarray(y, dtype=np.int64)
        if y.size == 0:
            raise EmptyNode("node has no rows")
        return cls(n=y.size, counts=np.bincount(y, minlength=n_classes))


def node_stats(rows: RowSet) -> NodeStats:
    """Exact sums or class counts over ``rows``, duplicates included."""
    if len(rows) == 0:
        raise EmptyNode("node has no rows")
    if rows.dataset.is_classification:
        return NodeStats.classification(rows.target, rows.dataset.n_classes)
    return NodeStats.regression(rows.target)


def _check(stats: NodeStats, classification: bool) -> None:
    if stats.is_classification != classification:
        want = "classification" if classification else "regression"
        raise KindMismatch(f"expected {want} node statistics")


def variance(stats: NodeStats):
    _check(stats, False)
    n = np.asarray(stats.n, dtype=np.float64)
    mean = stats.total / n
    return np.maximum(stats.total_sq / n - mean * mean, 0.0)


def gini(stats: NodeStats):
    _check(stats, True)
    p = stats.proportions
    return np.sum(p * (1.0 - p), axis=-1)


def cross_entropy(stats: NodeStats):
    _check(stats, True)
    p = stats.proportions
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return -np.sum(terms, axis=-1)


def impurity(stats: NodeStats, kind: ImpurityKind, class_of_interest: int | None = None):
    """Impurity of a node (or an array of nodes) under ``kind``."""
    if kind is ImpurityKind.VARIANCE:
        out = variance(stats)
    elif kind is ImpurityKind.GINI:
        out = gini(stats)
    elif kind is ImpurityKind.CROSS_ENTROPY:
        out = cross_entropy(stats)
    elif kind is ImpurityKind.HIGH_MEANS:
        _check(stats, False)
        out = -stats.mean
    elif kind is ImpurityKind.LOW_MEANS:
        _check(stats, False)
        out = stats.mean
    elif kind is ImpurityKind.CLASS_EXTREME:
        _check(stats, True)
        if class_of_interest is None or not 0 <= class_of_interest < np.shape(stats.counts)[-1]:
            raise ValueError(f"invalid class of interest {class_of_interest!r}")
        out = -stats.proportions[..., class_of_interest]
    else:
        raise ValueError(f"unknown impurity kind {kind!r}")
    return float(out) if np.ndim(out) == 0 else out


def misclassification_rate(stats: NodeStats):
    """``1 - max_k p_k``; a loss, not used as a splitting impurity."""
    _check(stats, True)
    out = 1.0 - np.max(stats.proportions, axis=-1)
    return float(out) if np.ndim(out) == 0 else out
