"""Dataset ingestion, standardization and train/test splitting.

CSV files are comma-separated UTF-8 with '.' decimals and at most one
header row. The first row is a header exactly when one of its cells does not
parse as a number.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from dgprf.exceptions import DataParseError, ShapeError
from dgprf.model.architecture import Task
from dgprf.numerics.rng import Rng

logger = logging.getLogger(__name__)

__all__ = [
    "CsvSchema",
    "Dataset",
    "Standardization",
    "load_csv",
    "standardize",
    "apply_standardization",
    "split",
]

_LINE_RE = re.compile(r"line (\d+)")


@dataclass(frozen=True)
class CsvSchema:
    """How to read a dataset file.

    Attributes:
        task: Regression or classification.
        label_cols: Target column names, or 0-based positions (negative counts
            from the end). Classification takes exactly one.
        n_classes: Number of classes; inferred as max label + 1 when None.
    """

    task: Task = Task.REGRESSION
    label_cols: tuple[str | int, ...] = (-1,)
    n_classes: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "task", Task(self.task))
        cols = self.label_cols
        if isinstance(cols, (str, int)):
            cols = (cols,)
        object.__setattr__(self, "label_cols", tuple(cols))
        if not self.label_cols:
            raise ValueError("schema needs at least one label column")
        if self.task is Task.CLASSIFICATION and len(self.label_cols) != 1:
            raise ValueError("classification takes exactly one label column")


@dataclass(frozen=True)
class Standardization:
    """Per-column location/scale used to standardize a dataset.

    Zero-variance columns carry std 1. ``y_mean``/``y_std`` are None for
    classification.
    """

    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: np.ndarray | None = None
    y_std: np.ndarray | None = None

    @classmethod
    def fit(cls, X: np.ndarray, Y: np.ndarray | None) -> Standardization:
        x_mean, x_std = _column_stats(X)
        if Y is None:
            return cls(x_mean, x_std)
        y_mean, y_std = _column_stats(Y)
        return cls(x_mean, x_std, y_mean, y_std)

    def transform_x(self, X: np.ndarray) -> np.ndarray:
        return (X - self.x_mean) / self.x_std

    def transform_y(self, Y: np.ndarray) -> np.ndarray:
        if self.y_mean is None or self.y_std is None:
            return Y
        return (Y - self.y_mean) / self.y_std

    def to_dict(self) -> dict[str, Any]:
        def _list(a: np.ndarray | None) -> list[float] | None:
            return None if a is None else [float(v) for v in a]

        return {
            "x_mean": _list(self.x_mean),
            "x_std": _list(self.x_std),
            "y_mean": _list(self.y_mean),
            "y_std": _list(self.y_std),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Standardization:
        def _array(v: Any) -> np.ndarray | None:
            return None if v is None else np.asarray(v, dtype=np.float64)

        x_mean = _array(data["x_mean"])
        x_std = _array(data["x_std"])
        assert x_mean is not None and x_std is not None
        return cls(x_mean, x_std, _array(data.get("y_mean")), _array(data.get("y_std")))


def _column_stats(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    std = values.std(axis=0, ddof=1)
    std = np.where(std > 0, std, 1.0)
    return mean, std


@dataclass(frozen=True)
class Dataset:
    """Inputs and targets held in memory.

    Attributes:
        X: (n, D_in) inputs.
        Y: (n, D_out) targets for regression, (n,) integer labels for classification.
        task: Regression or classification.
        feature_names: Input column names.
        n_classes: Number of classes (classification only).
        standardization: Record of the transform applied, None if raw.
    """

    X: np.ndarray
    Y: np.ndarray
    task: Task = Task.REGRESSION
    feature_names: tuple[str, ...] = ()
    n_classes: int | None = None
    standardization: Standardization | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "task", Task(self.task))
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim != 2:
            raise ShapeError(f"X must be 2-D, got shape {X.shape}")
        if self.task is Task.CLASSIFICATION:
            Y = np.asarray(self.Y, dtype=np.int64).reshape(-1)
            n_classes = self.n_classes if self.n_classes is not None else int(Y.max(initial=0)) + 1
            if Y.size and (Y.min() < 0 or Y.max() >= n_classes):
                raise ShapeError(f"labels must lie in [0, {n_classes})")
            object.__setattr__(self, "n_classes", int(n_classes))
        else:
            Y = np.asarray(self.Y, dtype=np.float64)
            if Y.ndim == 1:
                Y = Y[:, None]
        if Y.shape[0] != X.shape[0]:
            raise ShapeError(f"X has {X.shape[0]} rows but Y has {Y.shape[0]}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        if not self.feature_names:
            object.__setattr__(self, "feature_names", tuple(f"x{i}" for i in range(X.shape[1])))

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def d_in(self) -> int:
        return int(self.X.shape[1])

    @property
    def d_out(self) -> int:
        """Output width of a model for this data (number of classes for classification)."""
        if self.task is Task.CLASSIFICATION:
            return int(self.n_classes or 0)
        return int(self.Y.shape[1])

    def take(self, rows: np.ndarray) -> Dataset:
        """Subset of rows (standardization record carried over)."""
        return replace(self, X=self.X[rows], Y=self.Y[rows])


def _is_number(cell: Any) -> bool:
    try:
        float(cell)
    except (TypeError, ValueError):
        return False
    return True


def _resolve_columns(
    labels: Sequence[str | int], header: list[str] | None, n_cols: int
) -> list[int]:
    resolved = []
    for label in labels:
        if isinstance(label, str) and not label.lstrip("-").isdigit():
            if header is None or label not in header:
                raise DataParseError(f"label column '{label}' not found in header")
            resolved.append(header.index(label))
            continue
        idx = int(label)
        if not -n_cols <= idx < n_cols:
            raise DataParseError(f"label column index {idx} out of range for {n_cols} columns")
        resolved.append(idx % n_cols)
    return resolved


def load_csv(path: str | Path, schema: CsvSchema) -> Dataset:
    """Read a numeric CSV into a raw (unstandardized) Dataset.

    Args:
        path: File to read.
        schema: Task and label columns.

    Returns:
        Dataset in file row order.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        DataParseError: On ragged rows, non-numeric cells, missing label
            columns or labels outside the class range; the message carries the
            1-based file row and column.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    try:
        raw = pd.read_csv(
            path, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True
        )
    except pd.errors.EmptyDataError as e:
        raise DataParseError(f"{path} is empty") from e
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        row = int(match.group(1)) if match else None
        raise DataParseError(f"ragged row in {path}: {e}", row=row) from e

    cells = raw.to_numpy(dtype=object)
    header: list[str] | None = None
    first_data_row = 1
    if cells.shape[0] and not all(_is_number(c) for c in cells[0]):
        header = [str(c).strip() for c in cells[0]]
        cells = cells[1:]
        first_data_row = 2
    if cells.shape[0] == 0:
        raise DataParseError(f"{path} has no data rows")

    values = np.empty(cells.shape, dtype=np.float64)
    for i, row in enumerate(cells):
        for j, cell in enumerate(row):
            if not isinstance(cell, str):
                raise DataParseError(f"ragged row in {path}", row=i + first_data_row)
            value = float(cell) if _is_number(cell) else np.nan
            if not np.isfinite(value):
                raise DataParseError(
                    f"non-numeric cell {cell!r} in {path}", row=i + first_data_row, col=j + 1
                )
            values[i, j] = value

    n_cols = values.shape[1]
    label_idx = _resolve_columns(schema.label_cols, header, n_cols)
    feature_idx = [j for j in range(n_cols) if j not in label_idx]
    if not feature_idx:
        raise DataParseError(f"{path} has no input columns besides the labels")
    names = tuple(header[j] for j in feature_idx) if header else ()

    X = values[:, feature_idx]
    Y = values[:, label_idx]
    n_classes = schema.n_classes
    if schema.task is Task.CLASSIFICATION:
        labels = Y[:, 0]
        limit = n_classes if n_classes is not None else np.inf
        for i, label in enumerate(labels):
            if label != np.floor(label) or label < 0 or label >= limit:
                raise DataParseError(
                    f"unknown label {label!r} in {path}",
                    row=i + first_data_row,
                    col=label_idx[0] + 1,
                )
        Y = labels.astype(np.int64)
        if n_classes is None:
            n_classes = int(Y.max()) + 1
    logger.info("Loaded %d rows x %d inputs from %s", X.shape[0], X.shape[1], path)
    return Dataset(
        X=X, Y=Y, task=schema.task, feature_names=names, n_classes=n_classes
    )


def apply_standardization(ds: Dataset, record: Standardization) -> Dataset:
    """Apply an existing transform (e.g. training statistics) to raw data."""
    if ds.standardization is not None:
        raise ValueError("dataset is already standardized")
    if record.x_mean.shape[0] != ds.d_in:
        raise ShapeError(
            f"standardization covers {record.x_mean.shape[0]} inputs, dataset has {ds.d_in}"
        )
    Y = ds.Y if ds.task is Task.CLASSIFICATION else record.transform_y(ds.Y)
    return replace(ds, X=record.transform_x(ds.X), Y=Y, standardization=record)


def standardize(ds: Dataset) -> Dataset:
    """Zero-mean, unit sample-std (ddof=1) columns for X, and Y under regression.

    Raises:
        DataParseError: With fewer than two rows.
    """
    if ds.n < 2:
        raise DataParseError(f"standardize needs at least 2 rows, got {ds.n}")
    targets = None if ds.task is Task.CLASSIFICATION else ds.Y
    return apply_standardization(ds, Standardization.fit(ds.X, targets))


def split(ds: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded permutation split of raw data, standardized with training statistics.

    Args:
        ds: Raw dataset.
        test_fraction: Share of rows held out, in (0, 1).
        seed: Seed of the permutation.

    Returns:
        ``(train, test)``, both carrying the training standardization record.

    Raises:
        DataParseError: With fewer than three rows (two to standardize, one held out).
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    if ds.n < 3:
        raise DataParseError(f"splitting needs at least 3 rows, got {ds.n}")
    n_test = min(max(int(round(ds.n * test_fraction)), 1), ds.n - 2)
    order = Rng(seed).permutation(ds.n)
    test_rows = np.sort(order[:n_test])
    train_rows = np.sort(order[n_test:])
    train = standardize(ds.take(train_rows))
    assert train.standardization is not None
    test = apply_standardization(ds.take(test_rows), train.standardization)
    return train, test
