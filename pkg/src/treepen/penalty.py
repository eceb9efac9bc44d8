"""Interpretability penalties charged against the scaled split gain."""

from __future__ import annotations

import enum
from typing import Sequence

BranchPath = tuple[int, ...]


class PenaltyKind(enum.Enum):
    NONE = "none"
    NEW_VARIABLE = "new-variable"
    EMA = "ema"


def check_k(k: float) -> float:
    k = float(k)
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"penalty constant must lie in [0, 1], got {k}")
    return k


def penalty(kind: PenaltyKind, k: float, branch: Sequence[int], split_variable: int) -> float:
    """Charge for splitting on ``split_variable`` below ``branch``.

    ``branch`` lists the split variables from the root down to the current
    node. The EMA charge weights a mismatch with the parent's variable by
    ``k`` and each step further toward the root by another factor ``1 - k``.
    """
    k = check_k(k)
    if kind is PenaltyKind.NONE or k == 0.0:
        return 0.0
    if kind is PenaltyKind.NEW_VARIABLE:
        return k if split_variable not in branch else 0.0
    if kind is PenaltyKind.EMA:
        total = 0.0
        weight = k
        for var in reversed(branch):
            if var != split_variable:
                total += weight
            weight *= 1.0 - k
        return total
    raise ValueError(f"unknown penalty kind {kind!r}")


def penalized_objective(scaled_gain: float, gamma: float) -> float:
    """Score of a candidate split; the implicit no-split option scores 0."""
    return scaled_gain - gamma
