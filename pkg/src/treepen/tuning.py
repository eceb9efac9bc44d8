"""Choosing the penalty constant by the in-sample loss tolerance rule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from treepen.dataset import RowSet
from treepen.errors import KindMismatch
from treepen.grower import GrowConfig, SplitCache, Tree, grow
from treepen.penalty import PenaltyKind

DEFAULT_K_GRID = tuple(round(0.01 * i, 2) for i in range(1, 100))


def per_row_loss(tree: Tree, rows: RowSet) -> np.ndarray:
    """Squared error (regression) or 0/1 error (classification) per row."""
    if tree.task is not rows.dataset.task:
        raise KindMismatch("tree and rows belong to different task kinds")
    pred = tree.predict(rows.features)
    y = rows.target
    if tree.is_classification:
        return (pred != y).astype(np.float64)
    return (y - pred) ** 2


def in_sample_loss(tree: Tree, rows: RowSet) -> float:
    """Mean squared error or misclassification rate of ``tree`` on ``rows``."""
    return float(per_row_loss(tree, rows).mean())


def r_squared(tree: Tree, rows: RowSet) -> float:
    """``1 - MSE / Var(y)`` over ``rows`` (regression only)."""
    if tree.is_classification:
        raise KindMismatch("R^2 is defined for regression trees only")
    var = float(np.var(rows.target))
    mse = in_sample_loss(tree, rows)
    if var == 0.0:
        return 1.0 if mse == 0.0 else float("-inf")
    return 1.0 - mse / var


def parse_grid(text: str) -> tuple[float, ...]:
    """Parse ``start:step:end`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        start, step, end = (float(part) for part in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(np.floor((end - start) / step + 1e-9)) + 1
        values = [round(start + i * step, 10) for i in range(count)]
    else:
        values = [float(part) for part in text.split(",") if part.strip()]
    return tuple(values)


@dataclass(frozen=True)
class TuneConfig:
    base: GrowConfig
    k_grid: tuple[float, ...] = DEFAULT_K_GRID
    c: float = 0.10

    def __post_init__(self):
        grid = tuple(float(k) for k in self.k_grid)
        if not grid:
            raise ValueError("k grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("k grid must be strictly ascending")
        if grid[0] < 0.0 or grid[-1] > 1.0:
            raise ValueError("k grid values must lie in [0, 1]")
        if self.c < 0:
            raise ValueError("c must be non-negative")
        object.__setattr__(self, "k_grid", grid)


@dataclass
class TuneResult:
    k_star: float
    unpenalized_loss: float
    tuned_loss: float
    tree: Tree
    limit: float
    trace: dict[float, float] = field(default_factory=dict)


def select_k(losses: dict[float, float], unpenalized_loss: float, c: float) -> float:
    """Largest k whose loss is within ``(1 + c)`` of the unpenalized loss, else 0."""
    limit = (1.0 + c) * unpenalized_loss
    eligible = [k for k, loss in losses.items() if loss <= limit]
    return max(eligible, default=0.0)


def tune(learning: RowSet, config: TuneConfig, cache: SplitCache | None = None) -> TuneResult:
    """Grow one tree per grid value and keep the largest admissible k.

    Every grid value is evaluated because the in-sample loss is not
    monotone in k. Without a penalty there is nothing to tune and k* is 0.
    """
    cache = SplitCache() if cache is None else cache
    base = config.base
    unpenalized = grow(learning, base.with_k(0.0), cache)
    loss0 = in_sample_loss(unpenalized, learning)
    limit = (1.0 + config.c) * loss0
    if base.penalty is PenaltyKind.NONE:
        return TuneResult(0.0, loss0, loss0, unpenalized, limit)
    trees: dict[float, Tree] = {}
    trace: dict[float, float] = {}
    for k in config.k_grid:
        trees[k] = grow(learning, base.with_k(k), cache)
        trace[k] = in_sample_loss(trees[k], learning)
    k_star = select_k(trace, loss0, config.c)
    tree = trees.get(k_star, unpenalized)
    tuned_loss = trace.get(k_star, loss0)
    return TuneResult(k_star, loss0, tuned_loss, tree, limit, trace)
