"""Datasets: CSV ingestion, standardization, splitting and scoring."""

from dgprf.data.dataset import (
    CsvSchema,
    Dataset,
    Standardization,
    apply_standardization,
    load_csv,
    split,
    standardize,
)
from dgprf.data.metrics import metrics

__all__ = [
    "CsvSchema",
    "Dataset",
    "Standardization",
    "apply_standardization",
    "load_csv",
    "metrics",
    "split",
    "standardize",
]
