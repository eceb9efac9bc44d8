"""Independent brute-force reference implementations.

Everything here works in exact rational arithmetic over plain Python lists
and shares no code with the package, so agreement with it is evidence and
not a tautology. Criteria are named by string:

    "cart-regression", "os-purity-regression", "high-means", "low-means",
    "cart-gini", "os-purity-classification", "os-extreme-classification"
"""

from __future__ import annotations

import math
from fractions import Fraction

CLASSIFICATION = {"cart-gini", "os-purity-classification", "os-extreme-classification"}


def mean(ys):
    return Fraction(sum(ys), len(ys))


def variance(ys):
    m = mean(ys)
    return sum((Fraction(y) - m) ** 2 for y in ys) / len(ys)


def proportions(ys, n_classes):
    return [Fraction(sum(1 for y in ys if y == c), len(ys)) for c in range(n_classes)]


def gini(ys, n_classes):
    return sum(p * (1 - p) for p in proportions(ys, n_classes))


def mode(ys, n_classes):
    counts = [sum(1 for y in ys if y == c) for c in range(n_classes)]
    return counts.index(max(counts))


def scaled_gain(criterion, parent, left, right, n_classes=0, coi=None):
    """Exact scaled gain, or None when the parent is pure for the criterion."""
    n, nl, nr = len(parent), len(left), len(right)
    if criterion in ("cart-regression", "os-purity-regression"):
        phi = variance(parent)
        if phi == 0:
            return None
        if criterion == "cart-regression":
            return (phi - (Fraction(nl, n) * variance(left) + Fraction(nr, n) * variance(right))) / phi
        return (phi - min(variance(left), variance(right))) / phi
    if criterion == "high-means":
        d = max(parent) - mean(parent)
        if d == 0:
            return None
        return (max(mean(left), mean(right)) - mean(parent)) / d
    if criterion == "low-means":
        d = mean(parent) - min(parent)
        if d == 0:
            return None
        return (mean(parent) - min(mean(left), mean(right))) / d
    if criterion in ("cart-gini", "os-purity-classification"):
        phi = gini(parent, n_classes)
        if phi == 0:
            return None
        gl, gr = gini(left, n_classes), gini(right, n_classes)
        if criterion == "cart-gini":
            return (phi - (Fraction(nl, n) * gl + Fraction(nr, n) * gr)) / phi
        return (phi - min(gl, gr)) / phi
    if criterion == "os-extreme-classification":
        p = proportions(parent, n_classes)[coi]
        if p == 1:
            return None
        best = max(proportions(left, n_classes)[coi], proportions(right, n_classes)[coi])
        return (best - p) / (1 - p)
    raise ValueError(criterion)


def penalty(kind, k, branch, variable):
    k = Fraction(k)
    if kind == "none":
        return Fraction(0)
    if kind == "new-variable":
        return k if variable not in branch else Fraction(0)
    d = len(branch)
    return sum(
        (k * (1 - k) ** (d - 1 - j) for j, s in enumerate(branch) if s != variable),
        Fraction(0),
    )


def min_size(fraction, n):
    return max(1, math.ceil(Fraction(str(fraction)) * n))


def candidates(xs, ys, rows, min_rows):
    """Yield (variable, threshold, left_rows, right_rows) in tie-break order."""
    p = len(xs[0])
    for v in range(p):
        values = sorted({xs[i][v] for i in rows})
        for lo, hi in zip(values, values[1:]):
            left = [i for i in rows if xs[i][v] <= lo]
            right = [i for i in rows if xs[i][v] > lo]
            if len(left) >= min_rows and len(right) >= min_rows:
                t = (lo + hi) / 2.0
                if not lo <= t < hi:
                    t = lo
                yield v, t, left, right


def best_split(xs, ys, rows, branch, criterion, pen, k, min_rows, n_classes=0, coi=None):
    best = None
    for v, t, left, right in candidates(xs, ys, rows, min_rows):
        g = scaled_gain(criterion, [ys[i] for i in rows], [ys[i] for i in left],
                        [ys[i] for i in right], n_classes, coi)
        if g is None:
            return None
        score = g - penalty(pen, k, branch, v)
        if best is None or score > best[0]:
            best = (score, v, t, left, right)
    if best is None or best[0] <= 0:
        return None
    return best[1:]


def grow(xs, ys, criterion, pen="none", k=0.0, fraction=0.05, n_classes=0, coi=None):
    """Nested-tuple tree in the same shape as ``Tree.structure()``."""
    rows = list(range(len(ys)))
    m = min_size(fraction, len(ys))
    classification = criterion in CLASSIFICATION

    def rec(rows, branch):
        found = best_split(xs, ys, rows, branch, criterion, pen, k, m, n_classes, coi)
        if found is None:
            node_ys = [ys[i] for i in rows]
            value = mode(node_ys, n_classes) if classification else float(mean(node_ys))
            return (len(rows), value)
        v, t, left, right = found
        return (v, t, rec(left, branch + (v,)), rec(right, branch + (v,)))

    return rec(rows, ())


def high_means_split(xs, ys, rows, min_rows):
    """argmax over candidates of the larger child mean (no scaling at all)."""
    best = None
    for v, t, left, right in candidates(xs, ys, rows, min_rows):
        score = max(mean([ys[i] for i in left]), mean([ys[i] for i in right]))
        if best is None or score > best[0]:
            best = (score, v, t)
    if best is None or best[0] <= mean([ys[i] for i in rows]):
        return None
    return best[1], best[2]


def class_extreme_split(xs, ys, rows, min_rows, coi):
    """argmax over candidates of the larger child share of class ``coi``."""

    def share(idx):
        return Fraction(sum(1 for i in idx if ys[i] == coi), len(idx))

    best = None
    for v, t, left, right in candidates(xs, ys, rows, min_rows):
        score = max(share(left), share(right))
        if best is None or score > best[0]:
            best = (score, v, t)
    if best is None or best[0] <= share(rows):
        return None
    return best[1], best[2]
