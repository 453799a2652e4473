"""Conditional likelihoods log p(y | f) and their gradients with respect to f.

Public API:
    gaussian_loglik(y, f, log_lambda) -> float
    gaussian_loglik_grad(y, f, log_lambda) -> (grad_f, grad_log_lambda)
    softmax_loglik(label, logits) -> float
    softmax_loglik_grad(label, logits) -> np.ndarray
    log_softmax(logits) -> np.ndarray
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import logsumexp

from dgprf.exceptions import ShapeError

__all__ = [
    "LikelihoodKind",
    "LikelihoodSpec",
    "gaussian_loglik",
    "gaussian_loglik_grad",
    "gaussian_loglik_terms",
    "softmax_loglik",
    "softmax_loglik_grad",
    "softmax_loglik_terms",
    "log_softmax",
]

LOG_2PI = float(np.log(2.0 * np.pi))


class LikelihoodKind(str, Enum):
    GAUSSIAN = "gaussian"
    SOFTMAX = "softmax"


@dataclass(frozen=True)
class LikelihoodSpec:
    """Likelihood family; ``n_classes`` is only meaningful for SOFTMAX."""

    kind: LikelihoodKind
    n_classes: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", LikelihoodKind(self.kind))
        if self.kind is LikelihoodKind.SOFTMAX and self.n_classes < 2:
            raise ValueError(f"softmax likelihood needs n_classes >= 2, got {self.n_classes}")

    @property
    def has_noise(self) -> bool:
        return self.kind is LikelihoodKind.GAUSSIAN

    def terms(self, Y: np.ndarray, F: np.ndarray, log_lambda: float = 0.0) -> np.ndarray:
        """Per-point log p(y | f); ``log_lambda`` is ignored by SOFTMAX."""
        if self.kind is LikelihoodKind.SOFTMAX:
            if F.shape[-1] != self.n_classes:
                raise ShapeError(f"expected {self.n_classes} logits per point, got {F.shape[-1]}")
            return softmax_loglik_terms(Y, F)
        return gaussian_loglik_terms(Y, F, log_lambda)


def gaussian_loglik_terms(Y: np.ndarray, F: np.ndarray, log_lambda: float) -> np.ndarray:
    """Per-point Gaussian log-likelihood, summed over output columns.

    Args:
        Y: (n, D) targets.
        F: (..., n, D) latent values (leading axes broadcast).
        log_lambda: log noise variance.

    Returns:
        (..., n) array.
    """
    lam = np.exp(log_lambda)
    resid = Y - F
    return np.sum(-0.5 * (LOG_2PI + log_lambda) - resid * resid / (2.0 * lam), axis=-1)


def gaussian_loglik(y: np.ndarray, f: np.ndarray, log_lambda: float) -> float:
    """Σ_o [-½ log(2πλ) - (y_o - f_o)² / (2λ)] for one point."""
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    f = np.atleast_1d(np.asarray(f, dtype=np.float64))
    if y.shape != f.shape:
        raise ShapeError(f"y and f shapes differ: {y.shape} vs {f.shape}")
    return float(gaussian_loglik_terms(y, f, log_lambda))


def gaussian_loglik_grad(
    y: np.ndarray, f: np.ndarray, log_lambda: float
) -> tuple[np.ndarray, float]:
    """Gradients of :func:`gaussian_loglik`.

    Returns:
        ``(y - f) / λ`` and ``Σ_o [-½ + (y_o - f_o)² / (2λ)]``.
    """
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    f = np.atleast_1d(np.asarray(f, dtype=np.float64))
    lam = np.exp(log_lambda)
    resid = y - f
    return resid / lam, float(np.sum(-0.5 + resid * resid / (2.0 * lam)))


def log_softmax(logits: np.ndarray) -> np.ndarray:
    """Stable log-softmax over the last axis."""
    logits = np.asarray(logits, dtype=np.float64)
    return logits - logsumexp(logits, axis=-1, keepdims=True)


def softmax_loglik_terms(labels: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Per-point log-softmax of the true class.

    Args:
        labels: (n,) integer class indices.
        F: (..., n, K) logits.

    Returns:
        (..., n) array.
    """
    logp = log_softmax(F)
    idx = np.broadcast_to(labels[:, None], F.shape[:-1] + (1,))
    return np.take_along_axis(logp, idx, axis=-1)[..., 0]


def softmax_loglik(label: int, logits: np.ndarray) -> float:
    """logits[label] - logsumexp(logits)."""
    logits = np.asarray(logits, dtype=np.float64)
    if not 0 <= label < logits.shape[-1]:
        raise ShapeError(f"label {label} out of range for {logits.shape[-1]} classes")
    return float(log_softmax(logits)[label])


def softmax_loglik_grad(label: int, logits: np.ndarray) -> np.ndarray:
    """onehot(label) - softmax(logits)."""
    logits = np.asarray(logits, dtype=np.float64)
    grad = -np.exp(log_softmax(logits))
    grad[label] += 1.0
    return grad
