"""Analytic KL divergences between factorized Gaussians.

q(W^(l)) is compared with the standard normal prior. Under the variational
Ω strategies q(Ω^(l)) is compared with p(Ω^(l) | Θ) = N(0, 1/ℓ_d²) entrywise,
so the Ω term depends on the lengthscales and feeds their gradient.
"""

from __future__ import annotations

import numpy as np

from dgprf.model.dgp import DgpModel

__all__ = ["kl_gaussian", "kl_posterior_to_prior", "kl_gradients"]


def kl_gaussian(m1: float, v1: float, m2: float, v2: float) -> float:
    """KL[N(m1, v1) ‖ N(m2, v2)] = ½[log(v2/v1) - 1 + v1/v2 + (m1-m2)²/v2].

    Accepts arrays, in which case the elementwise divergences are summed.

    Raises:
        ValueError: If any variance is not strictly positive.
    """
    v1_arr = np.asarray(v1, dtype=np.float64)
    v2_arr = np.asarray(v2, dtype=np.float64)
    if np.any(v1_arr <= 0) or np.any(v2_arr <= 0):
        raise ValueError(f"variances must be positive, got v1={v1}, v2={v2}")
    diff = np.asarray(m1, dtype=np.float64) - np.asarray(m2, dtype=np.float64)
    terms = 0.5 * (np.log(v2_arr / v1_arr) - 1.0 + v1_arr / v2_arr + diff * diff / v2_arr)
    return float(np.sum(terms))


def _kl_w(mean: np.ndarray, log_var: np.ndarray) -> float:
    return float(0.5 * np.sum(-log_var - 1.0 + np.exp(log_var) + mean * mean))


def _kl_omega(mean: np.ndarray, log_var: np.ndarray, log_lengthscales: np.ndarray) -> float:
    # prior variance 1/ℓ_d² on row d
    ell2 = np.exp(2.0 * log_lengthscales)[:, None]
    return float(
        0.5
        * np.sum(
            -2.0 * log_lengthscales[:, None] - log_var - 1.0 + (np.exp(log_var) + mean * mean) * ell2
        )
    )


def kl_posterior_to_prior(model: DgpModel) -> tuple[float, float]:
    """Total KL of the variational posteriors from their priors.

    Returns:
        ``(kl_w, kl_omega)``; ``kl_omega`` is 0 under PRIOR_FIXED.
    """
    kl_w = 0.0
    kl_omega = 0.0
    for layer in range(model.n_layers):
        q = model.w_posterior[layer]
        kl_w += _kl_w(q.mean, q.log_var)
        q_omega = model.spectral[layer].variational
        if q_omega is not None:
            kl_omega += _kl_omega(q_omega.mean, q_omega.log_var, model.theta[layer].log_lengthscales)
    return kl_w, kl_omega


def kl_gradients(model: DgpModel) -> dict[str, np.ndarray]:
    """Gradients of ``kl_w + kl_omega`` keyed like :meth:`DgpModel.parameters`.

    Keys that the KL does not depend on (log σ², log λ, and log ℓ under
    PRIOR_FIXED) are absent.
    """
    grads: dict[str, np.ndarray] = {}
    for layer in range(model.n_layers):
        q = model.w_posterior[layer]
        grads[f"w_mean.{layer}"] = q.mean.copy()
        grads[f"w_log_var.{layer}"] = 0.5 * (q.var - 1.0)
        q_omega = model.spectral[layer].variational
        if q_omega is None:
            continue
        ell2 = model.theta[layer].lengthscales[:, None] ** 2
        grads[f"omega_mean.{layer}"] = q_omega.mean * ell2
        grads[f"omega_log_var.{layer}"] = 0.5 * (q_omega.var * ell2 - 1.0)
        grads[f"log_lengthscales.{layer}"] = np.sum(
            -1.0 + (q_omega.var + q_omega.mean**2) * ell2, axis=1
        )
    return grads
