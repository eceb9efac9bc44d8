"""Command-line interface: fit, tune, oob, compare, render, predict."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from treepen.dataset import Dataset, TaskKind, load_csv
from treepen.errors import DataError, TreepenError
from treepen.evaluation import (
    OobConfig,
    compare_penalties,
    interpretability_metrics,
    oob_estimate,
    report_csv,
    report_table,
)
from treepen.export import deserialize, render_dot, render_text, serialize, write_atomic
from treepen.gain import GainKind
from treepen.grower import GrowConfig, Tree, grow
from treepen.penalty import PenaltyKind
from treepen.tuning import DEFAULT_K_GRID, TuneConfig, in_sample_loss, parse_grid, r_squared, tune

logger = logging.getLogger("treepen")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

DEFAULTS = {
    "task": "auto",
    "criterion": "cart",
    "impurity": "gini",
    "class_of_interest": None,
    "penalty": "none",
    "k": 0.0,
    "c": 0.10,
    "k_grid": None,
    "min_node_frac": 0.05,
    "bootstrap": 100,
    "seed": None,
    "format": None,
    "penalties": "none,new-variable,ema",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--target", required=True, help="name of the response column")
    p.add_argument("--task", choices=["auto", "regression", "classification"], default=None)


def _add_grow_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--criterion", default=None,
                   choices=["cart", "os-purity", "high-means", "low-means", "os-extreme"])
    p.add_argument("--impurity", choices=["gini", "entropy"], default=None,
                   help="impurity for classification CART (default gini)")
    p.add_argument("--class-of-interest", default=None,
                   help="class label (or index) isolated by os-extreme")
    p.add_argument("--penalty", choices=[k.value for k in PenaltyKind], default=None)
    p.add_argument("--k", type=float, default=None, help="penalty constant in [0, 1]")
    p.add_argument("--min-node-frac", type=float, default=None,
                   help="minimum child size as a fraction of the learning sample")
    p.add_argument("--config", default=None, help="JSON file of option defaults")


def _add_tune_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c", type=float, default=None, help="allowed relative loss increase")
    p.add_argument("--k-grid", default=None, help="start:step:end or comma list")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treepen", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    fit = sub.add_parser("fit", help="grow a tree with a fixed penalty constant")
    _add_data_args(fit)
    _add_grow_args(fit)
    fit.add_argument("--out", help="model JSON path (default stdout)")
    fit.add_argument("--format", choices=["json", "dot", "text"], default=None)

    tn = sub.add_parser("tune", help="pick k* by the in-sample loss tolerance rule")
    _add_data_args(tn)
    _add_grow_args(tn)
    _add_tune_args(tn)
    tn.add_argument("--out", help="tuned model JSON path (default stdout)")
    tn.add_argument("--trace", help="CSV path for the per-k loss trace")

    oob = sub.add_parser("oob", help="out-of-bag risk estimate")
    _add_data_args(oob)
    _add_grow_args(oob)
    _add_tune_args(oob)
    oob.add_argument("--bootstrap", type=int, default=None, help="number of replicates B")
    oob.add_argument("--seed", type=int, default=None)
    oob.add_argument("--fixed-k", action="store_true", help="use --k instead of tuning")
    oob.add_argument("--out", help="per-replicate CSV path (default stdout)")

    cmp_ = sub.add_parser("compare", help="paired OOB comparison of penalties")
    _add_data_args(cmp_)
    _add_grow_args(cmp_)
    _add_tune_args(cmp_)
    cmp_.add_argument("--bootstrap", type=int, default=None)
    cmp_.add_argument("--seed", type=int, default=None)
    cmp_.add_argument("--penalties", default=None, help="comma list of penalty kinds")
    cmp_.add_argument("--out")
    cmp_.add_argument("--format", choices=["csv", "text"], default=None)

    rnd = sub.add_parser("render", help="render a model as DOT or text")
    rnd.add_argument("--model", required=True)
    rnd.add_argument("--format", choices=["dot", "text"], default=None)
    rnd.add_argument("--out")

    prd = sub.add_parser("predict", help="predict rows of a CSV with a saved model")
    prd.add_argument("--model", required=True)
    prd.add_argument("--data", required=True)
    prd.add_argument("--out")
    return parser


class Options:
    """Flag values layered over a config file over built-in defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file: dict = {}
        path = getattr(args, "config", None)
        if path:
            try:
                self.file = json.loads(Path(path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"--config: cannot read {path}: {exc}") from None
            if not isinstance(self.file, dict):
                raise UsageError("--config: expected a JSON object")

    def __getattr__(self, name):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        for key in (name, name.replace("_", "-")):
            if key in self.file:
                return self.file[key]
        if name == "seed":
            env = os.environ.get("TREEPEN_SEED")
            if env is not None:
                try:
                    return int(env)
                except ValueError:
                    raise UsageError(f"TREEPEN_SEED must be an integer, got {env!r}") from None
            return 0
        return DEFAULTS.get(name)


def _load(opts: Options) -> Dataset:
    return load_csv(opts.data, opts.target, opts.task)


def _gain_kind(opts: Options, dataset: Dataset) -> GainKind:
    classification = dataset.is_classification
    criterion = opts.criterion
    if criterion == "cart":
        if not classification:
            return GainKind.CART_REGRESSION
        return GainKind.CART_ENTROPY if opts.impurity == "entropy" else GainKind.CART_GINI
    if criterion == "os-purity":
        return GainKind.OS_PURITY_CLASSIFICATION if classification else GainKind.OS_PURITY_REGRESSION
    if criterion in ("high-means", "low-means"):
        if classification:
            raise UsageError(f"--criterion {criterion} needs a regression target")
        return GainKind.HIGH_MEANS if criterion == "high-means" else GainKind.LOW_MEANS
    if criterion == "os-extreme":
        if not classification:
            raise UsageError("--criterion os-extreme needs a classification target "
                             "(use high-means or low-means for regression)")
        return GainKind.OS_EXTREME_CLASSIFICATION
    raise UsageError(f"--criterion: unknown value {criterion!r}")


def _class_index(opts: Options, dataset: Dataset) -> int | None:
    label = opts.class_of_interest
    if label is None:
        return None
    label = str(label)
    if label in dataset.class_labels:
        return dataset.class_labels.index(label)
    if label.isdigit() and int(label) < dataset.n_classes:
        return int(label)
    raise UsageError(f"--class-of-interest: {label!r} is not one of {list(dataset.class_labels)}")


def _grow_config(opts: Options, dataset: Dataset) -> GrowConfig:
    gain = _gain_kind(opts, dataset)
    coi = _class_index(opts, dataset)
    if gain.needs_class_of_interest and coi is None:
        raise UsageError("--class-of-interest is required for --criterion os-extreme")
    try:
        return GrowConfig(gain, PenaltyKind(opts.penalty), float(opts.k),
                          float(opts.min_node_frac), coi)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _tune_config(opts: Options, base: GrowConfig) -> TuneConfig:
    try:
        grid = DEFAULT_K_GRID if opts.k_grid is None else parse_grid(str(opts.k_grid))
        return TuneConfig(base, grid, float(opts.c))
    except ValueError as exc:
        raise UsageError(f"--k-grid/--c: {exc}") from None


def _summary(tree: Tree, dataset: Dataset) -> dict:
    rows = dataset.all_rows()
    metrics = interpretability_metrics(tree)
    out = {"n": dataset.n_rows, "loss": in_sample_loss(tree, rows),
           "terminals": len(metrics.distinct_per_terminal),
           "max_branch_variables": metrics.max_distinct,
           "total_variables": metrics.total_distinct}
    if not tree.is_classification:
        out["r_squared"] = r_squared(tree, rows)
    return out


def _summary_line(summary: dict) -> str:
    if "r_squared" in summary:
        fit = f"R² = {summary['r_squared']:.2f} (MSE = {summary['loss']:.4g})"
    else:
        fit = f"MR = {summary['loss']:.4f}"
    return (f"{fit}; {summary['terminals']} terminal nodes, "
            f"{summary['total_variables']} variables used")


def _emit(path: str | None, data: str | bytes) -> None:
    if path:
        write_atomic(path, data)
    else:
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        sys.stdout.write(data)


def _note(text: str, to_stdout: bool) -> None:
    print(text, file=sys.stdout if to_stdout else sys.stderr)


def cmd_fit(opts: Options) -> int:
    dataset = _load(opts)
    config = _grow_config(opts, dataset)
    tree = grow(dataset.all_rows(), config)
    tree.summary = _summary(tree, dataset)
    fmt = opts.format or "json"
    if fmt == "dot":
        _emit(opts.out, render_dot(tree))
    elif fmt == "text":
        _emit(opts.out, render_text(tree))
    else:
        _emit(opts.out, serialize(tree))
    _note(_summary_line(tree.summary), bool(opts.out))
    return EXIT_OK


def cmd_tune(opts: Options) -> int:
    dataset = _load(opts)
    config = _tune_config(opts, _grow_config(opts, dataset))
    result = tune(dataset.all_rows(), config)
    tree = result.tree
    tree.summary = _summary(tree, dataset) | {"k_star": result.k_star,
                                               "unpenalized_loss": result.unpenalized_loss}
    _emit(opts.out, serialize(tree))
    if opts.trace:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "loss", "eligible"])
        for k, loss in sorted(result.trace.items()):
            w.writerow([repr(k), repr(loss), int(loss <= result.limit)])
        write_atomic(opts.trace, buf.getvalue())
    _note(f"k* = {result.k_star:g}; loss {result.tuned_loss:.6g} vs unpenalized "
          f"{result.unpenalized_loss:.6g} (limit {result.limit:.6g}); "
          + _summary_line(tree.summary), bool(opts.out))
    return EXIT_OK


def _oob_config(opts: Options, dataset: Dataset, tuned: bool) -> OobConfig:
    base = _grow_config(opts, dataset)
    tc = _tune_config(opts, base) if tuned else None
    try:
        return OobConfig(base, tc, int(opts.bootstrap), int(opts.seed))
    except ValueError as exc:
        raise UsageError(f"--bootstrap: {exc}") from None


def cmd_oob(opts: Options) -> int:
    dataset = _load(opts)
    config = _oob_config(opts, dataset, not opts.fixed_k)
    report = oob_estimate(dataset, config)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["replicate", "holdout_size", "loss", "k_star"])
    for b, size, loss, k in zip(report.replicates, report.holdout_sizes, report.losses,
                                report.k_stars):
        w.writerow([b, size, repr(loss), repr(k)])
    _emit(opts.out, buf.getvalue())
    line = f"R_OOB = {report.r_oob:.6g} over {len(report.losses)} replicates"
    if report.r_squared is not None:
        line += f"; OOB R² = {report.r_squared:.3f}"
    line += f"; average k* = {report.mean_k_star:.3f}"
    if report.dropped:
        line += f"; dropped (empty holdout): {report.dropped}"
    _note(line, bool(opts.out))
    return EXIT_OK


def cmd_compare(opts: Options) -> int:
    dataset = _load(opts)
    try:
        penalties = [PenaltyKind(p.strip()) for p in str(opts.penalties).split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"--penalties: {exc}") from None
    config = _oob_config(opts, dataset, True)
    rows = compare_penalties(dataset, config, penalties)
    text = report_table(rows) if opts.format == "text" else report_csv(rows)
    _emit(opts.out, text)
    return EXIT_OK


def _read_model(path: str) -> Tree:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc.strerror}") from None
    return deserialize(data)


def cmd_render(opts: Options) -> int:
    tree = _read_model(opts.model)
    text = render_text(tree) if opts.format == "text" else render_dot(tree)
    _emit(opts.out, text)
    return EXIT_OK


def cmd_predict(opts: Options) -> int:
    tree = _read_model(opts.model)
    path = Path(opts.data)
    try:
        with path.open(newline="", encoding="utf-8-sig") as f:
            reader = csv.reader(f)
            header = [h.strip() for h in next(reader, [])]
            records = [r for r in reader if r]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    missing = [name for name in tree.feature_names if name not in header]
    if missing:
        raise DataError(f"{path}: missing feature column(s) {', '.join(map(repr, missing))}")
    cols = [header.index(name) for name in tree.feature_names]
    x = np.empty((len(records), len(cols)))
    for i, record in enumerate(records):
        for j, c in enumerate(cols):
            cell = record[c].strip() if c < len(record) else ""
            try:
                x[i, j] = float(cell)
            except ValueError:
                raise DataError(f"{path}: bad value {cell!r} at row {i + 2}, "
                                f"column {tree.feature_names[j]!r}") from None
            if not np.isfinite(x[i, j]):
                raise DataError(f"{path}: non-finite value at row {i + 2}, "
                                f"column {tree.feature_names[j]!r}")
    pred = tree.predict(x)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["prediction"])
    for v in pred:
        w.writerow([tree.class_labels[v] if tree.is_classification else repr(float(v))])
    _emit(opts.out, buf.getvalue())
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "tune": cmd_tune,
    "oob": cmd_oob,
    "compare": cmd_compare,
    "render": cmd_render,
    "predict": cmd_predict,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](Options(args))
    except UsageError as exc:
        print(f"treepen: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, TreepenError, FileNotFoundError) as exc:
        print(f"treepen: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
