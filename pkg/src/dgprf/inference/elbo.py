"""Doubly-stochastic evidence lower bound and its reverse-mode gradient.

For a minibatch of m out of N points and N_MC reparameterized weight draws,

    ELBO ≈ (N / m) Σ_k (1 / N_MC) Σ_r log p(y_k | x_k, W̃_r, Ω̃_r, Θ)
           - KL[q(W) ‖ p(W)] - KL[q(Ω) ‖ p(Ω | Θ)]

The gradient is a hand-written reverse pass over the fixed layer graph
(projection -> activation -> linear map, repeated), reusing the noise recorded
in the forward draw so value and gradient come from the same estimate. Only
matrix products are used; nothing is factorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dgprf.exceptions import NumericalError, ShapeError
from dgprf.inference.kl import kl_gradients, kl_posterior_to_prior
from dgprf.kernels.features import OmegaStrategy
from dgprf.kernels.params import KernelFamily
from dgprf.model.dgp import DgpModel, LayerTrace, WeightDraw, propagate, sample_weights
from dgprf.model.likelihoods import LikelihoodKind, log_softmax
from dgprf.numerics.rng import Rng

__all__ = [
    "ElboEstimate",
    "GradientSet",
    "elbo_minibatch",
    "grad_elbo",
    "elbo_and_grad",
    "ELBO_CHUNK_SAMPLES",
]

GradientSet = dict[str, np.ndarray]

# MC samples pushed through the network at once; bounds peak memory.
ELBO_CHUNK_SAMPLES = 10


@dataclass(frozen=True)
class ElboEstimate:
    """One stochastic estimate of the bound.

    Attributes:
        total: data_fit - kl_w - kl_omega.
        data_fit: Expected log-likelihood rescaled by N / m.
        kl_w: KL of q(W) from N(0, I).
        kl_omega: KL of q(Ω) from p(Ω | Θ); 0 under PRIOR_FIXED.
    """

    total: float
    data_fit: float
    kl_w: float
    kl_omega: float

    @classmethod
    def combine(cls, data_fit: float, kl_w: float, kl_omega: float) -> ElboEstimate:
        total = data_fit - kl_w - kl_omega
        if not np.isfinite(total):
            raise NumericalError(
                f"non-finite ELBO (data_fit={data_fit}, kl_w={kl_w}, kl_omega={kl_omega})"
            )
        return cls(total=total, data_fit=data_fit, kl_w=kl_w, kl_omega=kl_omega)


def _check_batch(model: DgpModel, batch: tuple[np.ndarray, np.ndarray], n_total: int, n_mc: int):
    X, Y = batch
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ShapeError(f"batch inputs must be a nonempty (m, D) matrix, got shape {X.shape}")
    if model.spec.likelihood.kind is LikelihoodKind.SOFTMAX:
        Y = np.asarray(Y, dtype=np.int64).reshape(-1)
    else:
        Y = np.asarray(Y, dtype=np.float64)
        if Y.ndim == 1:
            Y = Y[:, None]
    if Y.shape[0] != X.shape[0]:
        raise ShapeError(f"batch has {X.shape[0]} inputs but {Y.shape[0]} targets")
    if n_mc < 1:
        raise ValueError(f"n_mc must be >= 1, got {n_mc}")
    if n_total < X.shape[0]:
        raise ValueError(f"n_total ({n_total}) is smaller than the batch ({X.shape[0]})")
    return X, Y


def _loglik_terms(model: DgpModel, Y: np.ndarray, F: np.ndarray) -> np.ndarray:
    return model.spec.likelihood.terms(Y, F, model.noise_log_var)


def elbo_minibatch(
    model: DgpModel,
    batch: tuple[np.ndarray, np.ndarray],
    n_total: int,
    n_mc: int,
    rng: Rng,
) -> ElboEstimate:
    """Stochastic ELBO on one minibatch.

    Args:
        model: Current parameters.
        batch: ``(X_m, Y_m)``; Y_m holds labels for classification.
        n_total: Dataset size N.
        n_mc: Monte Carlo samples N_MC.
        rng: Stream for the weight draw (consumed exactly as in :func:`grad_elbo`).

    Returns:
        ElboEstimate.
    """
    X, Y = _check_batch(model, batch, n_total, n_mc)
    draw = sample_weights(model, rng, n_mc)
    total_ll = 0.0
    for chunk in draw.chunks(ELBO_CHUNK_SAMPLES):
        F = propagate(model, X, chunk)[-1].outputs
        total_ll += float(np.sum(_loglik_terms(model, Y, F)))
    data_fit = total_ll * n_total / (X.shape[0] * n_mc)
    kl_w, kl_omega = kl_posterior_to_prior(model)
    return ElboEstimate.combine(data_fit, kl_w, kl_omega)


def _output_gradient(
    model: DgpModel, Y: np.ndarray, F: np.ndarray, scale: float, grads: GradientSet
) -> np.ndarray:
    """d(scaled log-likelihood)/dF; accumulates the log λ gradient for regression."""
    if model.spec.likelihood.kind is LikelihoodKind.SOFTMAX:
        onehot = np.eye(F.shape[-1])[Y]
        return scale * (onehot - np.exp(log_softmax(F)))
    lam = model.noise_var
    resid = Y - F
    grads["noise_log_var"] += scale * np.sum(-0.5 + resid * resid / (2.0 * lam))
    return scale * resid / lam


def _activation_backward(
    model: DgpModel, layer: int, trace: LayerTrace, d_features: np.ndarray
) -> np.ndarray:
    """dA from dΦ for the layer's feature map."""
    params = model.theta[layer]
    proj = trace.proj
    n_rf = proj.shape[-1]
    if params.family is KernelFamily.RBF:
        c = np.sqrt(params.sigma2 / n_rf)
        d_cos = d_features[..., :n_rf]
        d_sin = d_features[..., n_rf:]
        return c * (d_sin * np.cos(proj) - d_cos * np.sin(proj))
    # ReLU subgradient at 0 is 0
    c = np.sqrt(2.0 * params.sigma2 / n_rf)
    return c * d_features * (proj > 0)


def _backward(
    model: DgpModel,
    traces: list[LayerTrace],
    draw: WeightDraw,
    d_output: np.ndarray,
    grads: GradientSet,
) -> None:
    """Accumulate parameter gradients for one chunk of MC samples into ``grads``."""
    upstream = d_output
    for layer in reversed(range(model.n_layers)):
        trace = traces[layer]
        q = model.w_posterior[layer]
        eps_w = draw.w_noise[layer]
        weights = draw.weights[layer]

        d_weights = np.swapaxes(trace.features, -1, -2) @ upstream
        grads[f"w_mean.{layer}"] += d_weights.sum(axis=0)
        grads[f"w_log_var.{layer}"] += 0.5 * q.std * np.sum(d_weights * eps_w, axis=0)

        d_features = upstream @ np.swapaxes(weights, -1, -2)
        # Φ scales with √σ²
        grads[f"log_sigma2.{layer}"] += 0.5 * np.sum(d_features * trace.features)

        d_proj = _activation_backward(model, layer, trace, d_features)
        omega = draw.omegas[layer]
        d_omega = np.swapaxes(trace.inputs, -1, -2) @ d_proj

        block = model.spectral[layer]
        if block.strategy is OmegaStrategy.PRIOR_FIXED:
            # Ω = ε / ℓ, so dΩ_dj / d log ℓ_d = -Ω_dj
            grads[f"log_lengthscales.{layer}"] -= np.sum(d_omega * omega, axis=(0, 2))
        else:
            q_omega = block.variational
            assert q_omega is not None
            grads[f"omega_mean.{layer}"] += d_omega.sum(axis=0)
            grads[f"omega_log_var.{layer}"] += 0.5 * q_omega.std * np.sum(
                d_omega * draw.omega_noise[layer], axis=0
            )

        if layer == 0:
            break
        d_inputs = d_proj @ np.swapaxes(omega, -1, -2)
        # Fed-forward X columns sit after F and carry no parameters.
        upstream = d_inputs[..., : model.spec.gp_counts[layer - 1]]


def elbo_and_grad(
    model: DgpModel,
    batch: tuple[np.ndarray, np.ndarray],
    n_total: int,
    n_mc: int,
    rng: Rng,
) -> tuple[ElboEstimate, GradientSet]:
    """ELBO estimate and its gradient from a single weight draw.

    Args:
        model: Current parameters.
        batch: ``(X_m, Y_m)``.
        n_total: Dataset size N.
        n_mc: Monte Carlo samples N_MC.
        rng: Stream for the weight draw.

    Returns:
        The estimate and a gradient for every key of ``model.parameters()``.

    Raises:
        NumericalError: If the estimate is not finite.
    """
    X, Y = _check_batch(model, batch, n_total, n_mc)
    draw = sample_weights(model, rng, n_mc)
    grads: GradientSet = {k: np.zeros_like(v) for k, v in model.parameters().items()}
    scale = n_total / (X.shape[0] * n_mc)

    total_ll = 0.0
    for chunk in draw.chunks(ELBO_CHUNK_SAMPLES):
        traces = propagate(model, X, chunk)
        F = traces[-1].outputs
        total_ll += float(np.sum(_loglik_terms(model, Y, F)))
        d_output = _output_gradient(model, Y, F, scale, grads)
        _backward(model, traces, chunk, d_output, grads)

    kl_w, kl_omega = kl_posterior_to_prior(model)
    estimate = ElboEstimate.combine(total_ll * scale, kl_w, kl_omega)
    for key, value in kl_gradients(model).items():
        grads[key] = grads[key] - value
    for key, value in grads.items():
        if not np.all(np.isfinite(value)):
            raise NumericalError(f"non-finite gradient for {key}")
    return estimate, grads


def grad_elbo(
    model: DgpModel,
    batch: tuple[np.ndarray, np.ndarray],
    n_total: int,
    n_mc: int,
    rng: Rng,
) -> GradientSet:
    """Reverse-mode gradient of :func:`elbo_minibatch` for the same rng state."""
    return elbo_and_grad(model, batch, n_total, n_mc, rng)[1]
