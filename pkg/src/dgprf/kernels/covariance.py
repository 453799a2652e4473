"""Exact covariance functions.

These serve as oracles for the random feature approximations and as the GP
priors of the MCMC sampler; they are never used on the variational training
path.

Formulas (x̃ = x / ℓ elementwise):
    RBF:         σ² exp(-½ ‖x̃ - x̃'‖²)
    Arc-cosine:  σ² (1/π) (‖x̃‖ ‖x̃'‖)^p J_p(α),  α = arccos(x̃ᵀx̃' / (‖x̃‖ ‖x̃'‖))
    J₀(α) = π - α
    J₁(α) = sin α + (π - α) cos α
    J₂(α) = 3 sin α cos α + (π - α)(1 + 2 cos² α)

Public API:
    rbf_kernel(x, x2, params) -> float
    arccos_kernel(x, x2, params) -> float
    arccos_j(order, alpha) -> np.ndarray
    kernel_matrix(X, params, X2=None) -> np.ndarray
"""

from __future__ import annotations

import numpy as np

from dgprf.exceptions import ShapeError
from dgprf.kernels.params import KernelFamily, KernelParams

__all__ = ["rbf_kernel", "arccos_kernel", "arccos_j", "kernel_matrix"]


def _check_vectors(x: np.ndarray, x2: np.ndarray, params: KernelParams) -> None:
    if x.shape != x2.shape or x.ndim != 1 or x.shape[0] != params.dim:
        raise ShapeError(
            f"kernel inputs must be vectors of length {params.dim}, got {x.shape} and {x2.shape}"
        )


def arccos_j(order: int, alpha: np.ndarray | float) -> np.ndarray:
    """Angular part J_p(α) of the arc-cosine covariance.

    Args:
        order: p ∈ {0, 1, 2}.
        alpha: Angle(s) in [0, π].

    Returns:
        J_p evaluated elementwise.
    """
    a = np.asarray(alpha, dtype=np.float64)
    if order == 0:
        return np.pi - a
    if order == 1:
        return np.sin(a) + (np.pi - a) * np.cos(a)
    if order == 2:
        c = np.cos(a)
        return 3.0 * np.sin(a) * c + (np.pi - a) * (1.0 + 2.0 * c * c)
    raise ValueError(f"arc-cosine order must be 0, 1 or 2, got {order}")


def rbf_kernel(x: np.ndarray, x2: np.ndarray, params: KernelParams) -> float:
    """Squared-exponential ARD covariance between two points.

    Args:
        x: First input vector.
        x2: Second input vector.
        params: Layer hyperparameters (lengthscale count must match the inputs).

    Returns:
        k(x, x2) in (0, σ²].

    Raises:
        ShapeError: On dimension mismatch.
    """
    x = np.asarray(x, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    _check_vectors(x, x2, params)
    scaled = (x - x2) / params.lengthscales
    return params.sigma2 * float(np.exp(-0.5 * np.dot(scaled, scaled)))


def arccos_kernel(x: np.ndarray, x2: np.ndarray, params: KernelParams) -> float:
    """Arc-cosine covariance of order ``params.order`` with ARD input pre-scaling.

    Args:
        x: First input vector.
        x2: Second input vector.
        params: Layer hyperparameters.

    Returns:
        k(x, x2). For p >= 1 a zero-norm input gives 0 (continuity limit).

    Raises:
        ShapeError: On dimension mismatch.
        ValueError: For p = 0 with a zero-norm input (angle undefined).
    """
    x = np.asarray(x, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    _check_vectors(x, x2, params)
    xs = x / params.lengthscales
    xs2 = x2 / params.lengthscales
    n1 = float(np.linalg.norm(xs))
    n2 = float(np.linalg.norm(xs2))
    p = params.order
    if n1 == 0.0 or n2 == 0.0:
        if p == 0:
            raise ValueError("arc-cosine order 0 is undefined for zero-norm inputs")
        return 0.0
    cos_angle = float(np.clip(np.dot(xs, xs2) / (n1 * n2), -1.0, 1.0))
    alpha = np.arccos(cos_angle)
    return params.sigma2 / np.pi * (n1 * n2) ** p * float(arccos_j(p, alpha))


def kernel_matrix(
    X: np.ndarray, params: KernelParams, X2: np.ndarray | None = None
) -> np.ndarray:
    """Gram (or cross-covariance) matrix between the rows of X and X2.

    Args:
        X: (n, D) inputs, one point per row.
        params: Layer hyperparameters with D lengthscales.
        X2: Optional (n2, D) second set; defaults to X (symmetric Gram).

    Returns:
        (n, n2) covariance matrix.

    Raises:
        ShapeError: If column counts differ from the lengthscale count.
        ValueError: For arc-cosine p = 0 with zero-norm rows.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    symmetric = X2 is None
    B = X if X2 is None else np.atleast_2d(np.asarray(X2, dtype=np.float64))
    if X.shape[1] != params.dim or B.shape[1] != params.dim:
        raise ShapeError(
            f"kernel_matrix inputs need {params.dim} columns, got {X.shape[1]} and {B.shape[1]}"
        )
    A = X / params.lengthscales
    Bs = B / params.lengthscales

    if params.family is KernelFamily.RBF:
        diff = A[:, None, :] - Bs[None, :, :]
        K = params.sigma2 * np.exp(-0.5 * np.sum(diff * diff, axis=-1))
        return K

    p = params.order
    na = np.linalg.norm(A, axis=1)
    nb = np.linalg.norm(Bs, axis=1)
    zero = (na[:, None] == 0.0) | (nb[None, :] == 0.0)
    if p == 0 and np.any(zero):
        raise ValueError("arc-cosine order 0 is undefined for zero-norm inputs")
    denom = np.where(zero, 1.0, na[:, None] * nb[None, :])
    cos_angle = np.clip((A @ Bs.T) / denom, -1.0, 1.0)
    K = params.sigma2 / np.pi * (na[:, None] * nb[None, :]) ** p * arccos_j(p, np.arccos(cos_angle))
    K = np.where(zero, 0.0, K)
    if symmetric:
        K = 0.5 * (K + K.T)
    return K
