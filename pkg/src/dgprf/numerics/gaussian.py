"""Factorized (elementwise) Gaussian distributions over weight matrices.

Used for q(W) and, under the variational Ω strategies, for q(Ω). Variances
are stored as log-variances clamped to ``[LOG_VAR_MIN, LOG_VAR_MAX]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dgprf.exceptions import ShapeError

__all__ = ["GaussianVariational", "LOG_VAR_MIN", "LOG_VAR_MAX", "INIT_LOG_VAR"]

LOG_VAR_MIN = -20.0
LOG_VAR_MAX = 5.0
# log(1e-5)
INIT_LOG_VAR = -11.5


@dataclass(eq=False)
class GaussianVariational:
    """Elementwise N(mean, exp(log_var)) over a matrix.

    Attributes:
        mean: Means m_ij.
        log_var: Log-variances log s²_ij, same shape as ``mean``.
    """

    mean: np.ndarray
    log_var: np.ndarray

    def __post_init__(self) -> None:
        self.mean = np.array(self.mean, dtype=np.float64)
        self.log_var = np.clip(np.array(self.log_var, dtype=np.float64), LOG_VAR_MIN, LOG_VAR_MAX)
        if self.mean.shape != self.log_var.shape:
            raise ShapeError(
                f"mean shape {self.mean.shape} does not match log_var shape {self.log_var.shape}"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return self.mean.shape

    @property
    def var(self) -> np.ndarray:
        return np.exp(self.log_var)

    @property
    def std(self) -> np.ndarray:
        return np.exp(0.5 * self.log_var)

    def sample(self, noise: np.ndarray) -> np.ndarray:
        """Reparameterized draw ``mean + std * noise`` (broadcasts over a leading sample axis)."""
        return self.mean + self.std * noise

    @classmethod
    def initial(
        cls, rows: int, cols: int, rng_normal: np.ndarray | None = None, mean_std: float = 0.1
    ) -> GaussianVariational:
        """Small random means N(0, mean_std²) and a tiny shared variance.

        Args:
            rows: Number of rows.
            cols: Number of columns.
            rng_normal: Standard normal draws of shape (rows, cols); zeros if omitted.
            mean_std: Standard deviation of the initial means (0.1 ⇒ variance 0.01).
        """
        base = np.zeros((rows, cols)) if rng_normal is None else rng_normal
        return cls(mean=mean_std * base, log_var=np.full((rows, cols), INIT_LOG_VAR))
