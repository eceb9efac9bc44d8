"""Tabular data ingestion, row-subset views and bootstrap resampling."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from treepen.errors import DataError


class MissingColumn(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyDataset(DataError):
    pass


class SingleClass(DataError):
    pass


class TaskKind(enum.Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable in-memory sample of ``n_rows`` (target, features) pairs.

    ``target`` holds floats for regression and integer class indices for
    classification; ``class_labels`` maps those indices back to the
    original label strings.
    """

    feature_names: tuple[str, ...]
    features: np.ndarray
    target: np.ndarray
    task: TaskKind
    class_labels: tuple[str, ...] = ()
    name: str = ""

    def __post_init__(self):
        names = tuple(self.feature_names)
        if any(not n for n in names):
            raise DataError("feature names must be nonempty")
        if len(set(names)) != len(names):
            raise DataError("feature names must be unique")
        x = np.ascontiguousarray(self.features, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != len(names):
            raise DataError("feature matrix does not match feature names")
        if not np.all(np.isfinite(x)):
            raise DataError("feature values must be finite")
        if x.shape[0] == 0:
            raise EmptyDataset("dataset has no rows")
        if self.task is TaskKind.CLASSIFICATION:
            y = np.asarray(self.target, dtype=np.int64)
            k = len(self.class_labels)
            if k < 2:
                raise SingleClass(f"classification needs at least 2 classes, found {k}")
            if y.min() < 0 or y.max() >= k:
                raise DataError("class index out of range")
        else:
            y = np.asarray(self.target, dtype=np.float64)
            if not np.all(np.isfinite(y)):
                raise DataError("target values must be finite")
        if y.shape != (x.shape[0],):
            raise DataError("target length does not match feature rows")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "target", y)
        object.__setattr__(self, "class_labels", tuple(self.class_labels))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    @property
    def is_classification(self) -> bool:
        return self.task is TaskKind.CLASSIFICATION

    def all_rows(self) -> RowSet:
        return RowSet(self, np.arange(self.n_rows))


@dataclass(frozen=True, eq=False)
class RowSet:
    """Ordered view of dataset rows; duplicates are allowed (bootstrap)."""

    dataset: Dataset
    row_indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        idx = np.asarray(self.row_indices, dtype=np.int64).reshape(-1)
        if idx.size and (idx.min() < 0 or idx.max() >= self.dataset.n_rows):
            raise IndexError("row index out of range")
        idx.setflags(write=False)
        object.__setattr__(self, "row_indices", idx)

    def __len__(self) -> int:
        return self.row_indices.size

    @property
    def features(self) -> np.ndarray:
        return self.dataset.features[self.row_indices]

    @property
    def target(self) -> np.ndarray:
        return self.dataset.target[self.row_indices]

    def subset(self, positions: np.ndarray) -> RowSet:
        """Rows at the given positions of this view (not dataset indices)."""
        return RowSet(self.dataset, self.row_indices[positions])


def _parse_float(text: str, row: int, column: str) -> float:
    cell = text.strip()
    if not cell:
        raise ParseError(f"empty cell at row {row}, column {column!r}", row, column)
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(
            f"non-numeric value {cell!r} at row {row}, column {column!r}", row, column
        ) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {cell!r} at row {row}, column {column!r}", row, column)
    return value


def load_csv(
    path: str | Path,
    target_column: str,
    task: TaskKind | str | None = None,
    name: str | None = None,
) -> Dataset:
    """Read a headed CSV file into a :class:`Dataset`.

    Every non-target column must be numeric. With ``task=None`` (or
    ``"auto"``) the task is classification iff some target cell fails to
    parse as a number. Class indices follow first appearance in file order.
    Row numbers in diagnostics are 1-based file lines (header is line 1).
    """
    path = Path(path)
    if isinstance(task, str):
        task = None if task == "auto" else TaskKind(task)
    with path.open(newline="", encoding="utf-8-sig") as f:
        reader = csv.reader(f)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyDataset(f"{path}: file is empty") from None
        if target_column not in header:
            raise MissingColumn(f"{path}: target column {target_column!r} not in header")
        if len(set(header)) != len(header):
            raise ParseError(f"{path}: duplicate column names in header", 1)
        t_col = header.index(target_column)
        feature_names = [h for i, h in enumerate(header) if i != t_col]
        raw_target: list[str] = []
        rows: list[list[float]] = []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise ParseError(
                    f"{path}: row {line_no} has {len(record)} fields, expected {len(header)}",
                    line_no,
                )
            rows.append(
                [
                    _parse_float(cell, line_no, header[i])
                    for i, cell in enumerate(record)
                    if i != t_col
                ]
            )
            raw_target.append(record[t_col].strip())
    if not rows:
        raise EmptyDataset(f"{path}: no data rows")

    numeric = []
    for cell in raw_target:
        try:
            numeric.append(float(cell))
        except ValueError:
            numeric = None
            break
    if task is None:
        task = TaskKind.REGRESSION if numeric is not None else TaskKind.CLASSIFICATION

    if task is TaskKind.REGRESSION:
        if numeric is None:
            raise ParseError(f"{path}: target column {target_column!r} is not numeric")
        for line_no, (cell, v) in enumerate(zip(raw_target, numeric), start=2):
            if not cell or not math.isfinite(v):
                raise ParseError(
                    f"{path}: bad target value {cell!r} at row {line_no}", line_no, target_column
                )
        target = np.array(numeric, dtype=np.float64)
        labels: list[str] = []
    else:
        labels = []
        lookup: dict[str, int] = {}
        codes = []
        for line_no, cell in enumerate(raw_target, start=2):
            if not cell:
                raise ParseError(
                    f"{path}: empty target cell at row {line_no}", line_no, target_column
                )
            if cell not in lookup:
                lookup[cell] = len(labels)
                labels.append(cell)
            codes.append(lookup[cell])
        if len(labels) < 2:
            raise SingleClass(f"{path}: classification target has a single class")
        target = np.array(codes, dtype=np.int64)

    return Dataset(
        feature_names=tuple(feature_names),
        features=np.array(rows, dtype=np.float64).reshape(len(rows), len(feature_names)),
        target=target,
        task=task,
        class_labels=tuple(labels),
        name=name if name is not None else path.stem,
    )


def load_boston() -> Dataset:
    """The Boston Housing data (506 tracts, 13 predictors, target ``medv``)."""
    ref = resources.files("treepen") / "data" / "boston.csv"
    with resources.as_file(ref) as p:
        return load_csv(p, "medv", TaskKind.REGRESSION, name="boston")


def bootstrap_sample(
    dataset: Dataset, seed: int | Sequence[int]
) -> tuple[RowSet, RowSet]:
    """Draw N rows with replacement; the rows never drawn form the holdout.

    The generator is numpy's PCG64 seeded through ``SeedSequence(seed)``, so
    ``seed`` may be a plain integer or an ``(base_seed, replicate)`` pair.
    The out-of-bag rows are returned in ascending index order.
    """
    n = dataset.n_rows
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    in_bag = rng.integers(0, n, size=n)
    drawn = np.zeros(n, dtype=bool)
    drawn[in_bag] = True
    return RowSet(dataset, in_bag), RowSet(dataset, np.flatnonzero(~drawn))
