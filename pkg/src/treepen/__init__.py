"""Decision trees with interpretability-penalized split criteria."""

from treepen.dataset import Dataset, RowSet, TaskKind, bootstrap_sample, load_boston, load_csv
from treepen.evaluation import (
    OobConfig,
    OobReport,
    compare_penalties,
    interpretability_metrics,
    oob_estimate,
)
from treepen.export import deserialize, render_dot, render_text, serialize
from treepen.gain import GainKind, raw_gain, scale_gain
from treepen.grower import GrowConfig, SplitRule, Tree, best_split, grow, predict
from treepen.impurity import ImpurityKind, NodeStats, impurity, node_stats
from treepen.penalty import PenaltyKind, penalized_objective, penalty
from treepen.tuning import TuneConfig, TuneResult, in_sample_loss, r_squared, tune

__all__ = [
    "Dataset", "RowSet", "TaskKind", "bootstrap_sample", "load_boston", "load_csv",
    "OobConfig", "OobReport", "compare_penalties", "interpretability_metrics", "oob_estimate",
    "deserialize", "render_dot", "render_text", "serialize",
    "GainKind", "raw_gain", "scale_gain",
    "GrowConfig", "SplitRule", "Tree", "best_split", "grow", "predict",
    "ImpurityKind", "NodeStats", "impurity", "node_stats",
    "PenaltyKind", "penalized_objective", "penalty",
    "TuneConfig", "TuneResult", "in_sample_loss", "r_squared", "tune",
]
