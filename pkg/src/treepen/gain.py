"""Goodness-of-split for CART and one-sided criteria, and its [0, 1] scaling."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from treepen.errors import DegenerateChild, KindMismatch, ZeroDenominator
from treepen.impurity import ImpurityKind, NodeStats, impurity


class GainKind(enum.Enum):
    CART_REGRESSION = "cart-regression"
    CART_GINI = "cart-gini"
    CART_ENTROPY = "cart-entropy"
    OS_PURITY_REGRESSION = "os-purity-regression"
    OS_PURITY_CLASSIFICATION = "os-purity-classification"
    HIGH_MEANS = "high-means"
    LOW_MEANS = "low-means"
    OS_EXTREME_CLASSIFICATION = "os-extreme-classification"

    @property
    def impurity_kind(self) -> ImpurityKind:
        return _IMPURITY[self]

    @property
    def one_sided(self) -> bool:
        return self not in (GainKind.CART_REGRESSION, GainKind.CART_GINI, GainKind.CART_ENTROPY)

    @property
    def for_classification(self) -> bool:
        return self.impurity_kind.for_classification

    @property
    def needs_class_of_interest(self) -> bool:
        return self is GainKind.OS_EXTREME_CLASSIFICATION


_IMPURITY = {
    GainKind.CART_REGRESSION: ImpurityKind.VARIANCE,
    GainKind.CART_GINI: ImpurityKind.GINI,
    GainKind.CART_ENTROPY: ImpurityKind.CROSS_ENTROPY,
    GainKind.OS_PURITY_REGRESSION: ImpurityKind.VARIANCE,
    GainKind.OS_PURITY_CLASSIFICATION: ImpurityKind.GINI,
    GainKind.HIGH_MEANS: ImpurityKind.HIGH_MEANS,
    GainKind.LOW_MEANS: ImpurityKind.LOW_MEANS,
    GainKind.OS_EXTREME_CLASSIFICATION: ImpurityKind.CLASS_EXTREME,
}


@dataclass(frozen=True)
class SplitEvaluation:
    raw_gain: float
    scaled_gain: float
    left_stats: NodeStats
    right_stats: NodeStats


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def raw_gain(
    parent: NodeStats,
    left: NodeStats,
    right: NodeStats,
    kind: GainKind,
    class_of_interest: int | None = None,
):
    """Unscaled gain of splitting ``parent`` into ``left`` and ``right``.

    CART kinds use the size-weighted child impurity; one-sided kinds keep
    only the better (lower-impurity) child. ``left``/``right`` may hold
    arrays of candidate children sharing one parent.
    """
    for s in (parent, left, right):
        if s.is_classification != kind.for_classification:
            raise KindMismatch(f"{kind.value} does not apply to these node statistics")
    n_left = np.asarray(left.n)
    n_right = np.asarray(right.n)
    if np.any(n_left <= 0) or np.any(n_right <= 0):
        raise DegenerateChild("split leaves an empty child")
    imp = kind.impurity_kind
    phi = impurity(parent, imp, class_of_interest)
    phi_left = impurity(left, imp, class_of_interest)
    phi_right = impurity(right, imp, class_of_interest)
    if kind.one_sided:
        return _scalar(phi - np.minimum(phi_left, phi_right))
    n = n_left + n_right
    return _scalar(phi - (n_left / n * phi_left + n_right / n * phi_right))


def scale_denominator(parent: NodeStats, kind: GainKind, class_of_interest: int | None = None) -> float:
    """Largest gain any split of ``parent`` can achieve under ``kind``.

    Raises :class:`ZeroDenominator` when the parent is already pure or
    constant for the criterion; such a node must be terminal.
    """
    if parent.is_classification != kind.for_classification:
        raise KindMismatch(f"{kind.value} does not apply to these node statistics")
    if kind.for_classification:
        counts = np.asarray(parent.counts)
        if kind is GainKind.OS_EXTREME_CLASSIFICATION:
            d = 1.0 - counts[class_of_interest] / parent.n
            pure = counts[class_of_interest] == parent.n
        else:
            d = impurity(parent, kind.impurity_kind)
            pure = counts.max() == parent.n
    else:
        pure = parent.y_max == parent.y_min
        if kind is GainKind.HIGH_MEANS:
            d = parent.y_max - parent.mean
        elif kind is GainKind.LOW_MEANS:
            d = parent.mean - parent.y_min
        else:
            d = impurity(parent, ImpurityKind.VARIANCE)
    if pure or not d > 0:
        raise ZeroDenominator("parent node is pure for this criterion")
    return float(d)


def scale_gain(parent: NodeStats, raw, kind: GainKind, class_of_interest: int | None = None):
    """Gain as a fraction of the parent's maximal attainable gain.

    Negative gains are clamped to 0, which the grower reads as "no split".
    The upper clamp at 1 only absorbs rounding in child means.
    """
    d = scale_denominator(parent, kind, class_of_interest)
    return _scalar(np.clip(np.asarray(raw) / d, 0.0, 1.0))


def evaluate_split(
    parent: NodeStats,
    left: NodeStats,
    right: NodeStats,
    kind: GainKind,
    class_of_interest: int | None = None,
) -> SplitEvaluation:
    raw = raw_gain(parent, left, right, kind, class_of_interest)
    return SplitEvaluation(raw, scale_gain(parent, raw, kind, class_of_interest), left, right)
