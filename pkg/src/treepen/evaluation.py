"""Out-of-bag risk estimation, penalty comparisons and branch metrics."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from treepen.dataset import Dataset, bootstrap_sample
from treepen.grower import GrowConfig, Tree, grow
from treepen.penalty import PenaltyKind
from treepen.tuning import TuneConfig, per_row_loss, tune

logger = logging.getLogger(__name__)

REPORT_COLUMNS = (
    "dataset",
    "criterion",
    "penalty",
    "oob_loss",
    "loss_increase_pct",
    "avg_k_star",
    "mean_holdout_frac",
)


@dataclass(frozen=True)
class OobConfig:
    """Bootstrap settings plus the fitting procedure applied to each resample.

    With ``tune`` set, every replicate picks its own k* on its resample;
    otherwise ``grow_config`` is used with its fixed k.
    """

    grow_config: GrowConfig
    tune: TuneConfig | None = None
    n_replicates: int = 100
    base_seed: int = 0

    def __post_init__(self):
        if self.n_replicates < 1:
            raise ValueError("need at least one bootstrap replicate")


@dataclass
class OobReport:
    losses: list[float]
    k_stars: list[float]
    holdout_sizes: list[int]
    replicates: list[int]
    dropped: list[int] = field(default_factory=list)
    n_rows: int = 0
    target_variance: float | None = None

    @property
    def r_oob(self) -> float:
        return float(np.mean(self.losses)) if self.losses else float("nan")

    @property
    def mean_k_star(self) -> float:
        return float(np.mean(self.k_stars)) if self.k_stars else float("nan")

    @property
    def r_squared(self) -> float | None:
        """OOB R^2 against the variance of y over the full sample."""
        if self.target_variance is None:
            return None
        return 1.0 - self.r_oob / self.target_variance

    @property
    def mean_holdout_frac(self) -> float:
        return float(np.mean(self.holdout_sizes)) / self.n_rows if self.holdout_sizes else 0.0


def fit_procedure(learning, config: OobConfig) -> tuple[Tree, float]:
    if config.tune is not None:
        result = tune(learning, config.tune)
        return result.tree, result.k_star
    tree = grow(learning, config.grow_config)
    return tree, config.grow_config.k


def oob_estimate(dataset: Dataset, config: OobConfig) -> OobReport:
    """Average holdout loss over bootstrap replicates.

    Replicate ``b`` (1-based) resamples with seed ``(base_seed, b)``, so runs
    with the same base seed see identical resamples whatever the procedure.
    Replicates with an empty holdout are dropped and listed in ``dropped``.
    """
    losses, k_stars, sizes, kept, dropped = [], [], [], [], []
    for b in range(1, config.n_replicates + 1):
        learning, holdout = bootstrap_sample(dataset, (config.base_seed, b))
        if len(holdout) == 0:
            logger.warning("replicate %d has an empty holdout; dropped", b)
            dropped.append(b)
            continue
        tree, k_star = fit_procedure(learning, config)
        per_row = per_row_loss(tree, holdout)
        losses.append(float(per_row.sum()) / per_row.size)
        k_stars.append(k_star)
        sizes.append(len(holdout))
        kept.append(b)
    variance = None if dataset.is_classification else float(np.var(dataset.target))
    return OobReport(losses, k_stars, sizes, kept, dropped, dataset.n_rows, variance)


@dataclass(frozen=True)
class ComparisonRow:
    dataset: str
    criterion: str
    penalty: str
    oob_loss: float
    loss_increase_pct: float
    avg_k_star: float
    mean_holdout_frac: float
    report: OobReport = field(repr=False, compare=False)

    def as_record(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_COLUMNS}


def compare_penalties(
    dataset: Dataset, config: OobConfig, penalties: Sequence[PenaltyKind]
) -> list[ComparisonRow]:
    """One OOB row per penalty, paired on the same resamples.

    The loss increase is relative to an unpenalized run with the same
    seeds, which is computed even when ``NONE`` is not among ``penalties``.
    """
    base = config.grow_config
    tune_config = config.tune

    def run(kind: PenaltyKind) -> OobReport:
        grow_config = base.with_k(0.0 if kind is PenaltyKind.NONE else base.k, kind)
        tc = None
        if tune_config is not None:
            tc = TuneConfig(grow_config, tune_config.k_grid, tune_config.c)
        return oob_estimate(dataset, OobConfig(grow_config, tc, config.n_replicates, config.base_seed))

    reports = {PenaltyKind.NONE: run(PenaltyKind.NONE)}
    rows = []
    for kind in penalties:
        if kind not in reports:
            reports[kind] = run(kind)
        report = reports[kind]
        reference = reports[PenaltyKind.NONE].r_oob
        increase = 100.0 * (report.r_oob - reference) / reference if reference else 0.0
        rows.append(
            ComparisonRow(
                dataset.name,
                base.gain.value,
                kind.value,
                report.r_oob,
                increase,
                report.mean_k_star,
                report.mean_holdout_frac,
                report,
            )
        )
    return rows


def report_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.as_record().items()})
    return buf.getvalue()


def report_table(rows: Sequence[ComparisonRow]) -> str:
    """Aligned plain-text rendering of the comparison rows."""
    body = [[_fmt(v) for v in row.as_record().values()] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h)
              for i, h in enumerate(REPORT_COLUMNS)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(REPORT_COLUMNS, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


@dataclass(frozen=True)
class InterpretabilityMetrics:
    distinct_per_terminal: tuple[int, ...]
    switches_per_terminal: tuple[int, ...]
    max_distinct: int
    mean_distinct: float
    total_distinct: int


def branch_distinct(branch: Sequence[int]) -> int:
    return len(set(branch))


def branch_switches(branch: Sequence[int]) -> int:
    """Number of adjacent unequal pairs along the branch."""
    return sum(1 for a, b in zip(branch, branch[1:]) if a != b)


def interpretability_metrics(tree: Tree) -> InterpretabilityMetrics:
    """Per-terminal variable usage, in pre-order (left to right)."""
    terminals = list(tree.root.terminals())
    distinct = tuple(branch_distinct(t.branch) for t in terminals)
    switches = tuple(branch_switches(t.branch) for t in terminals)
    used = {v for t in terminals for v in t.branch}
    return InterpretabilityMetrics(
        distinct_per_terminal=distinct,
        switches_per_terminal=switches,
        max_distinct=max(distinct),
        mean_distinct=float(np.mean(distinct)),
        total_distinct=len(used),
    )
