"""Held-out error and mean negative log-likelihood."""

from __future__ import annotations

import numpy as np

from dgprf.exceptions import ShapeError
from dgprf.model.architecture import Task
from dgprf.model.dgp import PredictiveSummary

__all__ = ["metrics"]


def metrics(pred: PredictiveSummary, truth: np.ndarray) -> tuple[float, float]:
    """Score a predictive distribution against the truth.

    Args:
        pred: MC predictive summary at the test inputs.
        truth: (n, D_out) standardized targets or (n,) labels.

    Returns:
        ``(metric, mnll)`` where metric is RMSE (regression) or the error rate
        (classification) and MNLL is the mean negative log predictive density.
    """
    n = pred.samples.shape[1]
    if pred.task is Task.CLASSIFICATION:
        truth = np.asarray(truth, dtype=np.int64).reshape(-1)
        if truth.shape[0] != n:
            raise ShapeError(f"{n} predictions for {truth.shape[0]} labels")
        metric = float(np.mean(pred.labels != truth))
    else:
        truth = np.asarray(truth, dtype=np.float64)
        if truth.ndim == 1:
            truth = truth[:, None]
        if truth.shape != pred.samples.shape[1:]:
            raise ShapeError(f"predictions {pred.samples.shape[1:]} vs targets {truth.shape}")
        metric = float(np.sqrt(np.mean((pred.mean - truth) ** 2)))
    mnll = float(-np.mean(pred.log_density(truth)))
    return metric, mnll
