"""Accuracy study of the random feature Gram approximation."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
import pandas as pd

from dgprf.kernels.covariance import kernel_matrix
from dgprf.kernels.features import OmegaStrategy, SpectralBlock, approx_gram
from dgprf.kernels.params import KernelFamily, KernelParams
from dgprf.numerics.rng import Rng

logger = logging.getLogger(__name__)

__all__ = ["GRAM_STUDY_SIZES", "STUDY_INPUT_NORM", "gram_error", "gram_error_study", "study_inputs"]

GRAM_STUDY_SIZES = (100, 1000, 10000)
# Arc-cosine variance grows with ‖x‖²; a common norm keeps both kernels on one scale.
STUDY_INPUT_NORM = 0.5


def gram_error(
    X: np.ndarray, params: KernelParams, n_rf: int, rng: Rng
) -> tuple[float, float]:
    """Max-abs error of one random feature Gram estimate.

    Returns:
        ``(max_abs_error, diag_max_abs_error)`` against the exact covariance.
    """
    block = SpectralBlock.initialize(OmegaStrategy.PRIOR_FIXED, params, n_rf, rng)
    diff = np.abs(approx_gram(X, block, params) - kernel_matrix(X, params))
    return float(diff.max()), float(np.diag(diff).max())


def study_inputs(n_points: int, dim: int, rng: Rng) -> np.ndarray:
    """Random directions scaled to norm STUDY_INPUT_NORM."""
    Z = rng.standard_normal((n_points, dim))
    return STUDY_INPUT_NORM * Z / np.linalg.norm(Z, axis=1, keepdims=True)


def gram_error_study(
    seed: int,
    sizes: Sequence[int] = GRAM_STUDY_SIZES,
    n_seeds: int = 10,
    n_points: int = 20,
    dim: int = 5,
) -> pd.DataFrame:
    """Gram errors for both kernels at unit hyperparameters.

    Inputs come from :func:`study_inputs`; frequencies are redrawn for every
    (kernel, size, replicate).

    Returns:
        DataFrame with columns kernel, n_rf, seed, max_abs_error, diag_max_abs_error
        and ``2 * len(sizes) * n_seeds`` rows.
    """
    X = study_inputs(n_points, dim, Rng(seed, (0,)))
    rows = []
    for family in (KernelFamily.RBF, KernelFamily.ARC_COSINE):
        params = KernelParams(0.0, np.zeros(dim), family)
        for n_rf in sizes:
            for rep in range(n_seeds):
                err, diag_err = gram_error(X, params, n_rf, Rng(seed, (1, n_rf, rep)))
                rows.append(
                    {
                        "kernel": family.value,
                        "n_rf": n_rf,
                        "seed": rep,
                        "max_abs_error": err,
                        "diag_max_abs_error": diag_err,
                    }
                )
            logger.info("%s N_RF=%d done", family.value, n_rf)
    return pd.DataFrame(rows)
