"""Two-layer DGP with the output GP integrated out.

Model: F^(1) ~ N(0, K(X, θ^(0))), F^(2) | F^(1) ~ N(0, K(F^(1), θ^(1))),
Y | F^(2) ~ N(F^(2), λI). Marginalizing F^(2) gives
p(Y | F^(1)) = N(Y | 0, K(F^(1), θ^(1)) + λI), and F^(2) | Y, F^(1) is Gaussian
in closed form. Factorizations are used freely here; n is small.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from dgprf.exceptions import NumericalError, ShapeError
from dgprf.kernels.covariance import kernel_matrix
from dgprf.kernels.params import KernelParams
from dgprf.numerics.rng import Rng

__all__ = [
    "JITTER",
    "CollapsedHypers",
    "CollapsedState",
    "collapsed_loglik",
    "sample_f2_conditional",
    "f2_conditional_moments",
    "cholesky_lower",
]

JITTER = 1e-8
LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class CollapsedHypers:
    """Fixed hyperparameters of the collapsed model.

    Attributes:
        theta0: Covariance of the hidden layer over X.
        theta1: Covariance of the output layer over F^(1) (1-D inputs).
        noise_var: Likelihood variance λ.
    """

    theta0: KernelParams
    theta1: KernelParams
    noise_var: float

    def __post_init__(self) -> None:
        if self.theta1.dim != 1:
            raise ShapeError(f"theta1 must act on a single hidden GP, got dim {self.theta1.dim}")
        if self.noise_var <= 0:
            raise ValueError(f"noise_var must be positive, got {self.noise_var}")


def cholesky_lower(K: np.ndarray, what: str = "covariance") -> np.ndarray:
    """Lower Cholesky factor; failure is reported as NumericalError."""
    try:
        return linalg.cholesky(K, lower=True)
    except linalg.LinAlgError as e:
        raise NumericalError(f"{what} is not positive definite: {e}") from e


def _as_vector(values: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be a vector, got shape {arr.shape}")
    return arr


def _output_gram(f1: np.ndarray, theta1: KernelParams) -> np.ndarray:
    return kernel_matrix(f1[:, None], theta1)


def collapsed_loglik(
    f1: np.ndarray, Y: np.ndarray, theta1: KernelParams, noise_var: float
) -> float:
    """log N(Y | 0, K(F^(1), θ^(1)) + λI).

    Raises:
        ShapeError: If ``f1`` and ``Y`` lengths differ.
        NumericalError: If the covariance is not positive definite.
    """
    f1 = _as_vector(f1, "f1")
    y = _as_vector(Y, "Y")
    if f1.shape != y.shape:
        raise ShapeError(f"f1 has {f1.shape[0]} entries, Y has {y.shape[0]}")
    cov = _output_gram(f1, theta1) + noise_var * np.eye(f1.shape[0])
    chol = cholesky_lower(cov, "K(F1) + λI")
    alpha = linalg.solve_triangular(chol, y, lower=True)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    return float(-0.5 * (y.shape[0] * LOG_2PI + log_det + alpha @ alpha))


def f2_conditional_moments(
    f1: np.ndarray, Y: np.ndarray, theta1: KernelParams, noise_var: float
) -> tuple[np.ndarray, np.ndarray]:
    """Mean K¹(K¹+λI)⁻¹Y and covariance K¹ - K¹(K¹+λI)⁻¹K¹ of F^(2) | Y, F^(1)."""
    f1 = _as_vector(f1, "f1")
    y = _as_vector(Y, "Y")
    K1 = _output_gram(f1, theta1)
    factor = linalg.cho_factor(K1 + noise_var * np.eye(f1.shape[0]), lower=True)
    mean = K1 @ linalg.cho_solve(factor, y)
    cov = K1 - K1 @ linalg.cho_solve(factor, K1)
    return mean, 0.5 * (cov + cov.T)


def sample_f2_conditional(
    f1: np.ndarray, Y: np.ndarray, theta1: KernelParams, noise_var: float, rng: Rng
) -> np.ndarray:
    """Exact draw of F^(2) from p(F^(2) | Y, F^(1)).

    Raises:
        NumericalError: If the conditional covariance is not positive definite after jitter.
    """
    mean, cov = f2_conditional_moments(f1, Y, theta1, noise_var)
    chol = cholesky_lower(cov + JITTER * np.eye(mean.shape[0]), "F2 conditional covariance")
    return mean + chol @ rng.standard_normal(mean.shape)


@dataclass
class CollapsedState:
    """Current hidden-layer sample of one chain.

    Attributes:
        f1: F^(1) at the n training inputs.
        chol0: Lower factor of K(X, θ^(0)) + jitter; draws prior ellipses.
        rng: Chain-owned stream.
        loglik: Cached log-likelihood of ``f1`` (None until computed).
    """

    f1: np.ndarray
    chol0: np.ndarray
    rng: Rng
    loglik: float | None = None

    @classmethod
    def from_prior(cls, X: np.ndarray, theta0: KernelParams, rng: Rng) -> CollapsedState:
        """Factor the hidden-layer prior once and start the chain at a prior draw."""
        X = np.asarray(X, dtype=np.float64)
        K0 = kernel_matrix(X, theta0) + JITTER * np.eye(X.shape[0])
        chol0 = cholesky_lower(K0, "K(X, θ0)")
        return cls(f1=chol0 @ rng.standard_normal(X.shape[0]), chol0=chol0, rng=rng)

    def prior_draw(self) -> np.ndarray:
        return self.chol0 @ self.rng.standard_normal(self.chol0.shape[0])
