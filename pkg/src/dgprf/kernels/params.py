"""Covariance hyperparameters θ^(l) for one layer."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from dgprf.exceptions import ShapeError

__all__ = ["KernelFamily", "KernelParams"]


class KernelFamily(str, Enum):
    """Covariance family of a layer (``RBF`` or ``ARC_COSINE`` of some order)."""

    RBF = "rbf"
    ARC_COSINE = "arc"


@dataclass(eq=False)
class KernelParams:
    """Log-parameterized marginal variance and ARD lengthscales.

    Attributes:
        log_sigma2: log (σ²)^(l).
        log_lengthscales: log ℓ_d for each input dimension d of the layer
            (Λ = diag(ℓ₁², ..., ℓ_D²)).
        family: Covariance family.
        order: Arc-cosine order p ∈ {0, 1, 2}; ignored for RBF.
    """

    log_sigma2: float
    log_lengthscales: np.ndarray = field(default_factory=lambda: np.zeros(1))
    family: KernelFamily = KernelFamily.RBF
    order: int = 1

    def __post_init__(self) -> None:
        self.log_sigma2 = float(self.log_sigma2)
        self.log_lengthscales = np.atleast_1d(np.array(self.log_lengthscales, dtype=np.float64))
        if self.log_lengthscales.ndim != 1:
            raise ShapeError("log_lengthscales must be a vector")
        self.family = KernelFamily(self.family)
        if self.family is KernelFamily.ARC_COSINE and self.order not in (0, 1, 2):
            raise ValueError(f"arc-cosine order must be 0, 1 or 2, got {self.order}")

    @property
    def sigma2(self) -> float:
        return float(np.exp(self.log_sigma2))

    @property
    def lengthscales(self) -> np.ndarray:
        return np.exp(self.log_lengthscales)

    @property
    def dim(self) -> int:
        return int(self.log_lengthscales.shape[0])

    @classmethod
    def initial(
        cls, dim: int, family: KernelFamily = KernelFamily.RBF, order: int = 1
    ) -> KernelParams:
        """Unit marginal variance and lengthscales ℓ_d = √dim."""
        return cls(
            log_sigma2=0.0,
            log_lengthscales=np.full(dim, 0.5 * np.log(dim)),
            family=family,
            order=order,
        )

    def replace(
        self, log_sigma2: float | None = None, log_lengthscales: np.ndarray | None = None
    ) -> KernelParams:
        """Copy with some values swapped."""
        return KernelParams(
            log_sigma2=self.log_sigma2 if log_sigma2 is None else log_sigma2,
            log_lengthscales=(
                self.log_lengthscales.copy() if log_lengthscales is None else log_lengthscales
            ),
            family=self.family,
            order=self.order,
        )
