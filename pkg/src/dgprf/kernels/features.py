"""Random feature maps approximating the RBF and arc-cosine covariances.

Feature layout for RBF is ``[cos(FΩ) | sin(FΩ)]`` (all cosines, then all
sines, never interleaved); checkpoints and W^(l) row order depend on it.

    Φ_rbf = √(σ² / N_RF) [cos(FΩ), sin(FΩ)]          shape (n, 2 N_RF)
    Φ_arc = √(2σ² / N_RF) H(FΩ) (FΩ)^p               shape (n, N_RF)

Spectral frequencies Ω (D × N_RF) follow the prior N(0, Λ⁻¹) column-wise, or
a factorized Gaussian posterior under the variational strategies.

Public API:
    sample_spectral(params, n_rf, rng) -> np.ndarray
    phi_rbf(F, omega, sigma2) -> np.ndarray
    phi_arc(F, omega, sigma2, order=1) -> np.ndarray
    phi(F, omega, params) -> np.ndarray
    approx_gram(X, block, params) -> np.ndarray
    SpectralBlock
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from dgprf.exceptions import ShapeError
from dgprf.kernels.params import KernelFamily, KernelParams
from dgprf.numerics.gaussian import GaussianVariational
from dgprf.numerics.linalg import as_matrix
from dgprf.numerics.rng import Rng, randn

__all__ = [
    "OmegaStrategy",
    "SpectralBlock",
    "sample_spectral",
    "activate",
    "phi_rbf",
    "phi_arc",
    "phi",
    "feature_count",
    "approx_gram",
]


class OmegaStrategy(str, Enum):
    """Treatment of the spectral frequencies Ω.

    PRIOR_FIXED: Ω = ε / ℓ with ε drawn once; lengthscales act through Ω.
    VAR_FIXED: Ω ~ q(Ω) reparameterized with ε drawn once and frozen.
    VAR_RESAMPLED: Ω ~ q(Ω) with fresh ε at every forward pass.
    """

    PRIOR_FIXED = "prior-fixed"
    VAR_FIXED = "var-fixed"
    VAR_RESAMPLED = "var-resampled"

    @property
    def is_variational(self) -> bool:
        return self is not OmegaStrategy.PRIOR_FIXED


def _check_project(F: np.ndarray, omega: np.ndarray) -> None:
    if F.shape[-1] != omega.shape[-2]:
        raise ShapeError(
            f"feature map dimension mismatch: inputs have {F.shape[-1]} columns, "
            f"omega has {omega.shape[-2]} rows"
        )


def sample_spectral(params: KernelParams, n_rf: int, rng: Rng) -> np.ndarray:
    """Draw Ω with columns i.i.d. N(0, Λ⁻¹).

    Args:
        params: Layer hyperparameters (D lengthscales).
        n_rf: Number of random features N_RF (>= 1).
        rng: Stream to draw from.

    Returns:
        (D, n_rf) matrix with entry (d, j) ~ N(0, 1/ℓ_d²).
    """
    if n_rf < 1:
        raise ValueError(f"n_rf must be >= 1, got {n_rf}")
    return randn(rng, params.dim, n_rf) / params.lengthscales[:, None]


def activate(
    proj: np.ndarray, family: KernelFamily, sigma2: float, order: int = 1
) -> np.ndarray:
    """Elementwise feature map γ applied to a projection A = FΩ, scaled by σ².

    Args:
        proj: (..., n, N_RF) projections.
        family: Covariance family.
        sigma2: Marginal variance σ².
        order: Arc-cosine order p.

    Returns:
        Φ with 2 N_RF (RBF) or N_RF (arc-cosine) columns.
    """
    n_rf = proj.shape[-1]
    if family is KernelFamily.RBF:
        return np.sqrt(sigma2 / n_rf) * np.concatenate([np.cos(proj), np.sin(proj)], axis=-1)
    if order == 0:
        act = (proj > 0).astype(np.float64)
    elif order == 1:
        act = np.maximum(proj, 0.0)
    elif order == 2:
        act = np.maximum(proj, 0.0) ** 2
    else:
        raise ValueError(f"arc-cosine order must be 0, 1 or 2, got {order}")
    return np.sqrt(2.0 * sigma2 / n_rf) * act


def phi_rbf(F: np.ndarray, omega: np.ndarray, sigma2: float) -> np.ndarray:
    """Trigonometric random features for the RBF covariance.

    Args:
        F: (..., n, D) layer inputs.
        omega: (..., D, N_RF) spectral frequencies.
        sigma2: Marginal variance σ².

    Returns:
        (..., n, 2 N_RF) features; every row has squared norm σ².
    """
    _check_project(F, omega)
    return activate(F @ omega, KernelFamily.RBF, sigma2)


def phi_arc(F: np.ndarray, omega: np.ndarray, sigma2: float, order: int = 1) -> np.ndarray:
    """Rectified polynomial random features for the arc-cosine covariance.

    Order 1 gives ReLU features ``√(2σ²/N_RF) max(0, FΩ)``.

    Args:
        F: (..., n, D) layer inputs.
        omega: (..., D, N_RF) spectral frequencies.
        sigma2: Marginal variance σ².
        order: Arc-cosine order p ∈ {0, 1, 2}.

    Returns:
        (..., n, N_RF) nonnegative features.
    """
    _check_project(F, omega)
    return activate(F @ omega, KernelFamily.ARC_COSINE, sigma2, order)


def phi(F: np.ndarray, omega: np.ndarray, params: KernelParams) -> np.ndarray:
    """Dispatch to the feature map matching ``params.family``."""
    _check_project(F, omega)
    return activate(F @ omega, params.family, params.sigma2, params.order)


def feature_count(family: KernelFamily, n_rf: int) -> int:
    """Width of Φ for ``n_rf`` frequencies (2 N_RF for RBF, N_RF for arc-cosine)."""
    return 2 * n_rf if family is KernelFamily.RBF else n_rf


@dataclass(eq=False)
class SpectralBlock:
    """Spectral frequencies of one layer under a given strategy.

    Attributes:
        strategy: Ω treatment.
        frozen_noise: (D, N_RF) fixed ε draws; present for PRIOR_FIXED and VAR_FIXED.
        variational: q(Ω) for the variational strategies.
    """

    strategy: OmegaStrategy
    frozen_noise: np.ndarray | None = None
    variational: GaussianVariational | None = None

    def __post_init__(self) -> None:
        self.strategy = OmegaStrategy(self.strategy)
        needs_noise = self.strategy is not OmegaStrategy.VAR_RESAMPLED
        needs_q = self.strategy.is_variational
        if needs_noise != (self.frozen_noise is not None):
            raise ValueError(f"{self.strategy.value} requires frozen_noise={needs_noise}")
        if needs_q != (self.variational is not None):
            raise ValueError(f"{self.strategy.value} requires a variational posterior={needs_q}")
        if self.frozen_noise is not None and self.variational is not None:
            if self.frozen_noise.shape != self.variational.shape:
                raise ShapeError("frozen_noise and q(Ω) shapes differ")

    @property
    def shape(self) -> tuple[int, int]:
        source = self.frozen_noise if self.frozen_noise is not None else self.variational.mean  # type: ignore[union-attr]
        return (int(source.shape[0]), int(source.shape[1]))

    @classmethod
    def initialize(
        cls, strategy: OmegaStrategy, params: KernelParams, n_rf: int, rng: Rng
    ) -> SpectralBlock:
        """Build a block whose Ω starts as a prior draw.

        Variational posteriors start at the prior: mean 0, variance 1/ℓ_d².
        """
        strategy = OmegaStrategy(strategy)
        if n_rf < 1:
            raise ValueError(f"n_rf must be >= 1, got {n_rf}")
        shape = (params.dim, n_rf)
        noise = None
        if strategy is not OmegaStrategy.VAR_RESAMPLED:
            noise = randn(rng, *shape)
        q = None
        if strategy.is_variational:
            log_var = np.broadcast_to(-2.0 * params.log_lengthscales[:, None], shape)
            q = GaussianVariational(mean=np.zeros(shape), log_var=log_var.copy())
        return cls(strategy=strategy, frozen_noise=noise, variational=q)

    def draw_noise(self, rng: Rng, n_samples: int) -> np.ndarray:
        """ε used for one forward pass.

        Returns:
            (1, D, N_RF) frozen noise, or (n_samples, D, N_RF) fresh draws for VAR_RESAMPLED.
        """
        if self.frozen_noise is not None:
            return self.frozen_noise[None, :, :]
        rows, cols = self.shape
        return rng.standard_normal((n_samples, rows, cols))

    def omega_from_noise(self, noise: np.ndarray, params: KernelParams) -> np.ndarray:
        """Reparameterized Ω for the given ε."""
        if self.strategy is OmegaStrategy.PRIOR_FIXED:
            return noise * np.exp(-params.log_lengthscales)[:, None]
        return self.variational.sample(noise)  # type: ignore[union-attr]

    def omega_values(self, params: KernelParams, rng: Rng | None = None) -> np.ndarray:
        """Materialized (D, N_RF) frequencies.

        Fixed strategies are deterministic; VAR_RESAMPLED needs ``rng`` for one draw.
        """
        if self.frozen_noise is None:
            if rng is None:
                raise ValueError("var-resampled frequencies need an rng to materialize")
            noise = self.draw_noise(rng, 1)
        else:
            noise = self.frozen_noise[None, :, :]
        return self.omega_from_noise(noise, params)[0]


def approx_gram(
    X: np.ndarray, block: SpectralBlock, params: KernelParams, rng: Rng | None = None
) -> np.ndarray:
    """Random feature estimate ΦΦᵀ of the Gram matrix of X.

    Args:
        X: (n, D) inputs.
        block: Spectral block; fixed strategies are used as-is.
        params: Layer hyperparameters.
        rng: Needed only for VAR_RESAMPLED blocks.

    Returns:
        (n, n) positive semidefinite matrix.
    """
    features = phi(as_matrix(X, "X"), block.omega_values(params, rng), params)
    return features @ features.T
