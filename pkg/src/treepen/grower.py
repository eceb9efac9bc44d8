"""Recursive partitioning with penalized split selection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from treepen.dataset import RowSet, TaskKind
from treepen.errors import DimensionMismatch, KindMismatch, ZeroDenominator
from treepen.gain import GainKind, SplitEvaluation, evaluate_split, raw_gain, scale_denominator
from treepen.impurity import NodeStats, impurity, node_stats
from treepen.penalty import BranchPath, PenaltyKind, check_k, penalty

# Objectives closer than this are ties, resolved by (variable, threshold).
# Scaled gains live in [0, 1], so this only absorbs float rounding.
TIE_EPS = 1e-12


@dataclass(frozen=True)
class GrowConfig:
    gain: GainKind = GainKind.CART_REGRESSION
    penalty: PenaltyKind = PenaltyKind.NONE
    k: float = 0.0
    min_node_fraction: float = 0.05
    class_of_interest: int | None = None

    def __post_init__(self):
        check_k(self.k)
        if not 0.0 < self.min_node_fraction < 0.5:
            raise ValueError("min_node_fraction must lie in (0, 0.5)")
        if self.gain.needs_class_of_interest and self.class_of_interest is None:
            raise ValueError(f"{self.gain.value} needs a class of interest")

    def with_k(self, k: float, penalty: PenaltyKind | None = None) -> GrowConfig:
        return GrowConfig(self.gain, self.penalty if penalty is None else penalty, k,
                          self.min_node_fraction, self.class_of_interest)

    def min_node_size(self, n_learning: int) -> int:
        # the epsilon keeps e.g. 0.05 * 60 = 3.0000000000000004 at 3
        return max(1, math.ceil(self.min_node_fraction * n_learning - 1e-9))


@dataclass(frozen=True)
class SplitRule:
    """Rows with ``x[variable] <= threshold`` go left, the rest go right."""

    variable: int
    threshold: float

    def goes_left(self, x) -> bool:
        return x[self.variable] <= self.threshold


@dataclass(eq=False)
class Node:
    depth: int
    branch: BranchPath
    n: int
    value: float | int
    impurity: float
    rule: SplitRule | None = None
    left: Node | None = None
    right: Node | None = None

    @property
    def is_terminal(self) -> bool:
        return self.rule is None

    def walk(self) -> Iterator[Node]:
        """Pre-order traversal, left subtree before right."""
        yield self
        if self.rule is not None:
            yield from self.left.walk()
            yield from self.right.walk()

    def terminals(self) -> Iterator[Node]:
        return (node for node in self.walk() if node.is_terminal)


@dataclass(eq=False)
class Tree:
    root: Node
    config: GrowConfig
    feature_names: tuple[str, ...]
    task: TaskKind
    n_train: int
    class_labels: tuple[str, ...] = ()
    # training diagnostics carried into model documents
    summary: dict | None = None

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def is_classification(self) -> bool:
        return self.task is TaskKind.CLASSIFICATION

    def predict(self, features) -> np.ndarray:
        """Vectorized prediction for an ``(m, p)`` array of rows."""
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"expected rows of {self.n_features} features, got shape {x.shape}"
            )
        out = np.empty(x.shape[0], dtype=np.int64 if self.is_classification else np.float64)
        stack = [(self.root, np.arange(x.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if node.is_terminal:
                out[idx] = node.value
                continue
            left = x[idx, node.rule.variable] <= node.rule.threshold
            stack.append((node.left, idx[left]))
            stack.append((node.right, idx[~left]))
        return out

    def structure(self) -> tuple:
        """Nested tuple of rules and fitted values, for exact tree comparison."""

        def rec(node: Node):
            if node.is_terminal:
                return (node.n, node.value)
            return (node.rule.variable, node.rule.threshold, rec(node.left), rec(node.right))

        return rec(self.root)


def predict(tree: Tree, x) -> float | int:
    """Fitted value of the terminal node that ``x`` routes to."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != tree.n_features:
        raise DimensionMismatch(f"expected {tree.n_features} features, got {x.size}")
    node = tree.root
    while not node.is_terminal:
        node = node.left if node.rule.goes_left(x) else node.right
    return node.value


def modal_class(stats: NodeStats) -> int:
    """Most frequent class; the lowest index wins ties."""
    if not stats.is_classification:
        raise KindMismatch("modal class needs classification statistics")
    return int(np.argmax(stats.counts))


def fitted_value(stats: NodeStats) -> float | int:
    return modal_class(stats) if stats.is_classification else float(stats.mean)


def _midpoint(lo: float, hi: float) -> float:
    mid = (lo + hi) / 2.0
    # adjacent floats: the midpoint may round up onto hi, which would send hi left
    return mid if lo <= mid < hi else lo


def candidate_splits(rows: RowSet, variable: int) -> list[float]:
    """Midpoints between consecutive distinct values of ``variable``."""
    values = np.unique(rows.features[:, variable])
    return [_midpoint(float(a), float(b)) for a, b in zip(values[:-1], values[1:])]


@dataclass
class _NodeScan:
    """Scaled gains of every candidate split of one node.

    ``scaled`` is ``(p, n - 1)``: entry ``[v, i]`` splits after the ``i``-th
    smallest value of feature ``v``; infeasible entries hold ``-inf``.
    """

    sorted_x: np.ndarray
    scaled: np.ndarray


@dataclass
class SplitCache:
    """Memo of node scans keyed by row membership.

    Penalties only reweight whole variables, so trees grown with different
    penalty constants on the same learning set can share every scan of a
    node they have in common.
    """

    scans: dict = field(default_factory=dict)
    hits: int = 0

    def get(self, key):
        scan = self.scans.get(key)
        if scan is not None:
            self.hits += 1
        return scan


def _scan_node(x: np.ndarray, y: np.ndarray, parent: NodeStats, config: GrowConfig,
               min_size: int, n_classes: int) -> _NodeScan | None:
    n, p = x.shape
    kind = config.gain
    try:
        scale = scale_denominator(parent, kind, config.class_of_interest)
    except ZeroDenominator:
        return None
    order = np.argsort(x, axis=0, kind="stable")
    xs = np.take_along_axis(x, order, axis=0)
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    if kind.for_classification:
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), y] = 1.0
        cum = np.cumsum(onehot[order], axis=0)[:-1]
        left = NodeStats(n=n_left, counts=cum)
        right = NodeStats(n=n_right, counts=np.asarray(parent.counts, dtype=np.float64) - cum)
    else:
        ys = y[order]
        cs = np.cumsum(ys, axis=0)[:-1]
        cs2 = np.cumsum(ys * ys, axis=0)[:-1]
        left = NodeStats(n=n_left, total=cs, total_sq=cs2)
        right = NodeStats(n=n_right, total=parent.total - cs, total_sq=parent.total_sq - cs2)
    raw = raw_gain(parent, left, right, kind, config.class_of_interest)
    scaled = np.clip(raw / scale, 0.0, 1.0)
    feasible = (xs[:-1] < xs[1:]) & (n_left >= min_size) & (n_right >= min_size)
    scaled = np.where(feasible, scaled, -np.inf)
    return _NodeScan(xs.T.copy(), scaled.T.copy())


def _select(scan: _NodeScan, branch: BranchPath, config: GrowConfig):
    """(variable, position) maximizing scaled gain minus penalty, or None."""
    p = scan.scaled.shape[0]
    gamma = np.array([penalty(config.penalty, config.k, branch, v) for v in range(p)])
    objective = scan.scaled - gamma[:, None]
    best = objective.max()
    if not best > TIE_EPS:
        return None
    v, i = np.argwhere(objective >= best - TIE_EPS)[0]
    return int(v), int(i)


def best_split(
    rows: RowSet,
    branch: BranchPath,
    config: GrowConfig,
    n_learning: int | None = None,
    cache: SplitCache | None = None,
) -> tuple[SplitRule, SplitEvaluation] | None:
    """Best penalized split of the node holding ``rows``.

    Both children must hold at least ``ceil(min_node_fraction * n_learning)``
    rows (``n_learning`` defaults to ``len(rows)``). Returns None when no
    candidate scores strictly above the no-split option.
    """
    n = len(rows)
    n_learning = n if n_learning is None else n_learning
    min_size = config.min_node_size(n_learning)
    if n < 2 * min_size:
        return None
    dataset = rows.dataset
    if config.gain.for_classification != dataset.is_classification:
        raise KindMismatch(f"{config.gain.value} does not match the dataset task")
    key = None
    scan = None
    if cache is not None:
        key = (config.gain, config.class_of_interest, min_size, rows.row_indices.tobytes())
        scan = cache.get(key)
    if scan is None:
        parent = node_stats(rows)
        scan = _scan_node(rows.features, rows.target, parent, config, min_size,
                          dataset.n_classes)
        if scan is None:
            scan = False
        if cache is not None:
            cache.scans[key] = scan
    if scan is False:
        return None
    chosen = _select(scan, branch, config)
    if chosen is None:
        return None
    v, i = chosen
    rule = SplitRule(v, _midpoint(float(scan.sorted_x[v, i]), float(scan.sorted_x[v, i + 1])))
    go_left = rows.features[:, v] <= rule.threshold
    evaluation = evaluate_split(
        node_stats(rows),
        node_stats(rows.subset(go_left)),
        node_stats(rows.subset(~go_left)),
        config.gain,
        config.class_of_interest,
    )
    return rule, evaluation


def grow(learning: RowSet, config: GrowConfig, cache: SplitCache | None = None) -> Tree:
    """Grow a tree depth-first on ``learning`` (duplicates allowed)."""
    if len(learning) == 0:
        raise ValueError("cannot grow a tree on an empty learning set")
    dataset = learning.dataset
    if config.gain.for_classification != dataset.is_classification:
        raise KindMismatch(f"{config.gain.value} does not match the dataset task")
    if config.class_of_interest is not None and dataset.is_classification:
        if not 0 <= config.class_of_interest < dataset.n_classes:
            raise ValueError(f"invalid class of interest {config.class_of_interest}")
    n_learning = len(learning)
    impurity_kind = config.gain.impurity_kind

    def build(rows: RowSet, depth: int, branch: BranchPath) -> Node:
        stats = node_stats(rows)
        node = Node(depth, branch, len(rows), fitted_value(stats),
                    impurity(stats, impurity_kind, config.class_of_interest))
        found = best_split(rows, branch, config, n_learning, cache)
        if found is None:
            return node
        rule, _ = found
        go_left = rows.features[:, rule.variable] <= rule.threshold
        child_branch = branch + (rule.variable,)
        node.rule = rule
        node.left = build(rows.subset(go_left), depth + 1, child_branch)
        node.right = build(rows.subset(~go_left), depth + 1, child_branch)
        return node

    return Tree(build(learning, 0, ()), config, dataset.feature_names, dataset.task,
                n_learning, dataset.class_labels)
