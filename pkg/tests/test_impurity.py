import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from treepen.errors import KindMismatch
from treepen.impurity import (
    EmptyNode,
    ImpurityKind,
    NodeStats,
    impurity,
    misclassification_rate,
    node_stats,
)

from conftest import make_dataset
from oracles import gini as exact_gini, variance as exact_variance
from treepen.dataset import RowSet


def cls_stats(*counts):
    return NodeStats(n=sum(counts), counts=np.array(counts))


def test_node_stats_regression_singleton():
    ds = make_dataset([[0.0]], [2.0])
    s = node_stats(ds.all_rows())
    assert (s.n, s.total, s.total_sq, s.y_min, s.y_max) == (1, 2.0, 4.0, 2.0, 2.0)


def test_node_stats_class_counts():
    ds = make_dataset([[0], [1], [2]], [0, 0, 1], classification=True)
    s = node_stats(ds.all_rows())
    assert s.n == 3 and s.counts.tolist() == [2, 1]


def test_node_stats_counts_duplicates():
    ds = make_dataset([[0.0], [1.0]], [5.0, 7.0])
    s = node_stats(RowSet(ds, [0, 0, 1]))
    assert s.n == 3 and s.total == 17.0


def test_node_stats_empty():
    ds = make_dataset([[0.0]], [1.0])
    with pytest.raises(EmptyNode):
        node_stats(RowSet(ds, []))


def test_gini_example_node():
    # 2 * 0.7 * 0.3
    assert impurity(cls_stats(70, 30), ImpurityKind.GINI) == pytest.approx(0.42, abs=1e-12)


def test_variance_brute_force():
    y = [1.0, 2.0, 3.0]
    assert impurity(NodeStats.regression(y), ImpurityKind.VARIANCE) == pytest.approx(2 / 3, abs=1e-12)
    assert float(exact_variance([1, 2, 3])) == pytest.approx(2 / 3)


def test_entropy_natural_log():
    assert impurity(cls_stats(5, 5), ImpurityKind.CROSS_ENTROPY) == pytest.approx(math.log(2), abs=1e-12)
    assert impurity(cls_stats(4, 0), ImpurityKind.CROSS_ENTROPY) == 0.0


def test_pure_node_has_zero_gini():
    assert impurity(cls_stats(9, 0), ImpurityKind.GINI) == 0.0


def test_extremes_sign_conventions():
    reg = NodeStats.regression([1.0, 2.0, 6.0])
    assert impurity(reg, ImpurityKind.HIGH_MEANS) == -3.0
    assert impurity(reg, ImpurityKind.LOW_MEANS) == 3.0
    assert impurity(cls_stats(1, 3), ImpurityKind.CLASS_EXTREME, 1) == -0.75


def test_class_extreme_needs_valid_class():
    with pytest.raises(ValueError):
        impurity(cls_stats(1, 3), ImpurityKind.CLASS_EXTREME, 2)


def test_kind_mismatch():
    with pytest.raises(KindMismatch):
        impurity(cls_stats(1, 1), ImpurityKind.VARIANCE)
    with pytest.raises(KindMismatch):
        impurity(NodeStats.regression([1.0]), ImpurityKind.GINI)
    with pytest.raises(KindMismatch):
        misclassification_rate(NodeStats.regression([1.0]))


def test_misclassification_rate():
    assert misclassification_rate(cls_stats(70, 30)) == pytest.approx(0.30)


@pytest.mark.parametrize(
    "left, right",
    [((45, 0), (25, 30)), ((60, 15), (10, 15))],
)
def test_both_example_splits_misclassify_a_quarter(left, right):
    n = sum(left) + sum(right)
    weighted = (sum(left) / n * misclassification_rate(cls_stats(*left))
                + sum(right) / n * misclassification_rate(cls_stats(*right)))
    assert weighted == pytest.approx(0.25, abs=1e-9)


def test_gini_separates_example_splits():
    def weighted_gini(left, right):
        n = sum(left) + sum(right)
        return (sum(left) / n * impurity(cls_stats(*left), ImpurityKind.GINI)
                + sum(right) / n * impurity(cls_stats(*right), ImpurityKind.GINI))

    # exact oracle: expand counts into label lists
    def labels(a, b):
        return [0] * a + [1] * b

    s1 = weighted_gini((45, 0), (25, 30))
    s2 = weighted_gini((60, 15), (10, 15))
    exact_s1 = Fraction(55, 100) * exact_gini(labels(25, 30), 2)
    exact_s2 = Fraction(75, 100) * exact_gini(labels(60, 15), 2) + Fraction(25, 100) * exact_gini(labels(10, 15), 2)
    assert s1 == pytest.approx(float(exact_s1), abs=1e-12)
    assert s2 == pytest.approx(float(exact_s2), abs=1e-12)
    assert s1 == pytest.approx(0.272727, abs=1e-6)
    assert s2 == pytest.approx(0.36, abs=1e-12)
    assert s1 < s2


counts_st = st.lists(st.integers(0, 50), min_size=2, max_size=6).filter(lambda c: sum(c) > 0)


@settings(max_examples=200)
@given(counts_st)
def test_classification_impurity_bounds(counts):
    s = NodeStats(n=sum(counts), counts=np.array(counts))
    k = len(counts)
    g = impurity(s, ImpurityKind.GINI)
    h = impurity(s, ImpurityKind.CROSS_ENTROPY)
    assert -1e-12 <= g <= (k - 1) / k + 1e-12
    assert -1e-12 <= h <= math.log(k) + 1e-12
    pure = max(counts) == sum(counts)
    assert (g == 0) == pure
    assert (h == 0) == pure


@settings(max_examples=200)
@given(st.integers(2, 6), st.integers(1, 20))
def test_uniform_maximizes(k, m):
    s = NodeStats(n=k * m, counts=np.full(k, m))
    assert impurity(s, ImpurityKind.GINI) == pytest.approx((k - 1) / k)
    assert impurity(s, ImpurityKind.CROSS_ENTROPY) == pytest.approx(math.log(k))


@settings(max_examples=200)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40))
def test_variance_nonnegative_and_zero_iff_constant(ys):
    v = impurity(NodeStats.regression(ys), ImpurityKind.VARIANCE)
    assert v >= 0
    if len(set(ys)) == 1:
        assert v == pytest.approx(0, abs=1e-9 * max(1, max(abs(y) for y in ys)) ** 2)


@settings(max_examples=200)
@given(
    st.lists(st.integers(0, 3), min_size=2, max_size=30),
    st.data(),
)
def test_weighted_children_never_exceed_parent(labels, data):
    cut = data.draw(st.integers(1, len(labels) - 1))
    y = np.array(labels)
    parent, left, right = y, y[:cut], y[cut:]
    w_left, w_right = cut / len(y), 1 - cut / len(y)
    for kind in (ImpurityKind.GINI, ImpurityKind.CROSS_ENTROPY):
        f = lambda a: impurity(NodeStats.classification(a, 4), kind)  # noqa: E731
        assert w_left * f(left) + w_right * f(right) <= f(parent) + 1e-12
    f = lambda a: impurity(NodeStats.regression(a.astype(float)), ImpurityKind.VARIANCE)  # noqa: E731
    assert w_left * f(left) + w_right * f(right) <= f(parent) + 1e-9
