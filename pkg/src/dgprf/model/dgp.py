"""The random-feature DGP viewed as a Bayesian DNN.

Each layer alternates a random feature map and a variationally weighted
linear map:

    A^(l) = H^(l) Ω^(l)
    Φ^(l) = γ(A^(l))              (cos/sin or ReLU, scaled by σ²)
    F^(l+1) = Φ^(l) W^(l)

Monte Carlo draws are carried along a leading sample axis, so all arrays
flowing through :func:`propagate` have shape (n_samples, n, cols); inputs and
frozen frequencies use a sample axis of length 1 and broadcast.

Public API:
    DgpModel
    WeightDraw
    sample_weights(model, rng, n_samples=1) -> WeightDraw
    propagate(model, X, draw) -> list[LayerTrace]
    forward(model, X, draw, return_hidden=False)
    predict(model, X, n_mc, rng) -> PredictiveSummary
    collapse_weights(W, omega) -> np.ndarray
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from dgprf.exceptions import ShapeError
from dgprf.kernels.features import SpectralBlock, activate
from dgprf.kernels.params import KernelParams
from dgprf.model.architecture import ArchitectureSpec, Task
from dgprf.model.likelihoods import gaussian_loglik_terms, log_softmax, softmax_loglik_terms
from dgprf.numerics.gaussian import GaussianVariational
from dgprf.numerics.linalg import matmul
from dgprf.numerics.rng import Rng

__all__ = [
    "DgpModel",
    "WeightDraw",
    "LayerTrace",
    "PredictiveSummary",
    "sample_weights",
    "propagate",
    "forward",
    "predict",
    "collapse_weights",
    "HYPERPARAMETER_PREFIXES",
    "DEFAULT_NOISE_VAR",
]

DEFAULT_NOISE_VAR = 0.01
HYPERPARAMETER_PREFIXES = ("log_sigma2.", "log_lengthscales.", "noise_log_var")
# Rows per forward pass in predict(); bounds memory at large n_mc.
PREDICT_CHUNK_ROWS = 512


@dataclass(eq=False)
class DgpModel:
    """All parameters of a random-feature DGP.

    Attributes:
        spec: Architecture.
        theta: Per-layer covariance hyperparameters Θ.
        spectral: Per-layer spectral blocks (Ω and its noise / posterior).
        w_posterior: Per-layer q(W^(l)).
        noise_log_var: log λ of the Gaussian likelihood (regression only).
    """

    spec: ArchitectureSpec
    theta: list[KernelParams]
    spectral: list[SpectralBlock]
    w_posterior: list[GaussianVariational]
    noise_log_var: float = float(np.log(DEFAULT_NOISE_VAR))

    def __post_init__(self) -> None:
        shapes = self.spec.layer_shapes()
        if not (len(self.theta) == len(self.spectral) == len(self.w_posterior) == len(shapes)):
            raise ShapeError(f"model needs {len(shapes)} layers of parameters")
        for layer, shape in enumerate(shapes):
            if self.theta[layer].dim != shape.d_in:
                raise ShapeError(
                    f"layer {layer}: {self.theta[layer].dim} lengthscales for input dim {shape.d_in}"
                )
            if self.spectral[layer].shape != (shape.d_in, shape.n_rf):
                raise ShapeError(
                    f"layer {layer}: omega shape {self.spectral[layer].shape}, "
                    f"expected {(shape.d_in, shape.n_rf)}"
                )
            if self.w_posterior[layer].shape != (shape.n_features, shape.d_out):
                raise ShapeError(
                    f"layer {layer}: W shape {self.w_posterior[layer].shape}, "
                    f"expected {(shape.n_features, shape.d_out)}"
                )
        self.noise_log_var = float(self.noise_log_var)

    @property
    def n_layers(self) -> int:
        return self.spec.n_layers

    @property
    def noise_var(self) -> float:
        return float(np.exp(self.noise_log_var))

    @classmethod
    def initialize(
        cls, spec: ArchitectureSpec, rng: Rng, noise_var: float = DEFAULT_NOISE_VAR
    ) -> DgpModel:
        """Fresh model: Θ at unit variance / √D lengthscales, Ω from the prior, small q(W).

        Draw order (fixed for reproducibility): per layer, Ω noise then W means.
        """
        theta: list[KernelParams] = []
        spectral: list[SpectralBlock] = []
        w_posterior: list[GaussianVariational] = []
        for shape in spec.layer_shapes():
            params = KernelParams.initial(shape.d_in, spec.kernel, spec.kernel_order)
            theta.append(params)
            spectral.append(SpectralBlock.initialize(spec.omega_strategy, params, shape.n_rf, rng))
            w_posterior.append(
                GaussianVariational.initial(
                    shape.n_features,
                    shape.d_out,
                    rng.standard_normal((shape.n_features, shape.d_out)),
                )
            )
        return cls(
            spec=spec,
            theta=theta,
            spectral=spectral,
            w_posterior=w_posterior,
            noise_log_var=float(np.log(noise_var)),
        )

    def parameters(self) -> dict[str, np.ndarray]:
        """Copies of every trainable array, keyed ``<name>.<layer>``.

        Scalars (log σ², log λ) are 0-d arrays. ``noise_log_var`` is present
        only for regression; ``omega_*`` only under variational Ω strategies.
        """
        params: dict[str, np.ndarray] = {}
        for layer in range(self.n_layers):
            q = self.w_posterior[layer]
            params[f"w_mean.{layer}"] = q.mean.copy()
            params[f"w_log_var.{layer}"] = q.log_var.copy()
            block = self.spectral[layer]
            if block.variational is not None:
                params[f"omega_mean.{layer}"] = block.variational.mean.copy()
                params[f"omega_log_var.{layer}"] = block.variational.log_var.copy()
            params[f"log_sigma2.{layer}"] = np.array(self.theta[layer].log_sigma2)
            params[f"log_lengthscales.{layer}"] = self.theta[layer].log_lengthscales.copy()
        if self.spec.likelihood.has_noise:
            params["noise_log_var"] = np.array(self.noise_log_var)
        return params

    def with_parameters(self, params: dict[str, np.ndarray]) -> DgpModel:
        """New model with trainable arrays replaced; frozen noise is shared."""
        theta: list[KernelParams] = []
        spectral: list[SpectralBlock] = []
        w_posterior: list[GaussianVariational] = []
        for layer in range(self.n_layers):
            theta.append(
                self.theta[layer].replace(
                    log_sigma2=float(params[f"log_sigma2.{layer}"]),
                    log_lengthscales=np.array(params[f"log_lengthscales.{layer}"], dtype=np.float64),
                )
            )
            block = self.spectral[layer]
            q_omega = None
            if block.variational is not None:
                q_omega = GaussianVariational(
                    params[f"omega_mean.{layer}"], params[f"omega_log_var.{layer}"]
                )
            spectral.append(
                SpectralBlock(block.strategy, frozen_noise=block.frozen_noise, variational=q_omega)
            )
            w_posterior.append(
                GaussianVariational(params[f"w_mean.{layer}"], params[f"w_log_var.{layer}"])
            )
        noise = float(params.get("noise_log_var", self.noise_log_var))
        return DgpModel(self.spec, theta, spectral, w_posterior, noise)

    def hyperparameter_keys(self) -> list[str]:
        """Keys of Θ and λ in :meth:`parameters` (frozen together early in training)."""
        return [k for k in self.parameters() if k.startswith(HYPERPARAMETER_PREFIXES)]


@dataclass
class WeightDraw:
    """One set of reparameterized weights for ``n_samples`` MC samples.

    Attributes:
        w_noise: Per-layer ε for W, shape (S, rows, cols).
        weights: Per-layer W̃ = m + s ε.
        omega_noise: Per-layer ε for Ω, shape (1, D, N_RF) when frozen, (S, D, N_RF) when resampled.
        omegas: Per-layer Ω values matching ``omega_noise``.
    """

    w_noise: list[np.ndarray]
    weights: list[np.ndarray]
    omega_noise: list[np.ndarray]
    omegas: list[np.ndarray]

    @property
    def n_samples(self) -> int:
        return int(self.weights[0].shape[0])

    def chunks(self, size: int) -> list[WeightDraw]:
        """Split along the sample axis; frozen Ω (sample axis 1) is shared by every chunk."""
        out = []
        for start in range(0, self.n_samples, size):
            stop = start + size

            def _take(arrays: list[np.ndarray], start: int = start, stop: int = stop) -> list[np.ndarray]:
                return [a if a.shape[0] == 1 else a[start:stop] for a in arrays]

            out.append(
                WeightDraw(
                    w_noise=[a[start:stop] for a in self.w_noise],
                    weights=[a[start:stop] for a in self.weights],
                    omega_noise=_take(self.omega_noise),
                    omegas=_take(self.omegas),
                )
            )
        return out


def sample_weights(model: DgpModel, rng: Rng, n_samples: int = 1) -> WeightDraw:
    """Draw W̃ (and Ω under VAR_RESAMPLED) for ``n_samples`` MC samples.

    Draw order per layer: ε_W then, if resampled, ε_Ω. The recorded ε lets the
    same draw serve both the ELBO value and its gradient.

    Args:
        model: Model whose posteriors are sampled.
        rng: Stream to draw from.
        n_samples: Number of MC samples N_MC (>= 1).

    Returns:
        WeightDraw with per-layer arrays.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    w_noise, weights, omega_noise, omegas = [], [], [], []
    for layer in range(model.n_layers):
        q = model.w_posterior[layer]
        eps = rng.standard_normal((n_samples,) + q.shape)
        w_noise.append(eps)
        weights.append(q.sample(eps))
        block = model.spectral[layer]
        eps_omega = block.draw_noise(rng, n_samples)
        omega_noise.append(eps_omega)
        omegas.append(block.omega_from_noise(eps_omega, model.theta[layer]))
    return WeightDraw(w_noise, weights, omega_noise, omegas)


@dataclass
class LayerTrace:
    """Intermediate values of one layer, kept for the reverse pass.

    Attributes:
        inputs: H^(l), (S or 1, n, D_l).
        proj: A^(l) = H^(l) Ω^(l).
        features: Φ^(l).
        outputs: F^(l+1) = Φ^(l) W^(l), (S, n, D_F^(l+1)).
    """

    inputs: np.ndarray
    proj: np.ndarray
    features: np.ndarray
    outputs: np.ndarray


def propagate(model: DgpModel, X: np.ndarray, draw: WeightDraw) -> list[LayerTrace]:
    """Run every layer and keep its intermediate values.

    Args:
        model: Model supplying Θ.
        X: (n, D_in) inputs.
        draw: Weights for S samples.

    Returns:
        One LayerTrace per layer.

    Raises:
        ShapeError: If ``X`` does not have D_in columns.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.spec.d_in:
        raise ShapeError(f"X must have shape (n, {model.spec.d_in}), got {X.shape}")
    base = X[None, :, :]
    inputs = base
    traces: list[LayerTrace] = []
    for layer in range(model.n_layers):
        params = model.theta[layer]
        omega = draw.omegas[layer]
        proj = inputs @ omega
        features = activate(proj, params.family, params.sigma2, params.order)
        outputs = features @ draw.weights[layer]
        traces.append(LayerTrace(inputs, proj, features, outputs))
        if model.spec.feedforward_inputs:
            tiled = np.broadcast_to(base, (outputs.shape[0],) + base.shape[1:])
            inputs = np.concatenate([outputs, tiled], axis=-1)
        else:
            inputs = outputs
    return traces


def forward(
    model: DgpModel, X: np.ndarray, draw: WeightDraw, return_hidden: bool = False
) -> np.ndarray | tuple[np.ndarray, list[np.ndarray]]:
    """Monte Carlo samples of F^(N_h).

    Args:
        model: Model supplying Θ.
        X: (n, D_in) inputs.
        draw: Weights for S samples.
        return_hidden: Also return every F^(l), l = 1..N_h.

    Returns:
        (S, n, D_out) outputs, optionally with the list of layer outputs.
    """
    traces = propagate(model, X, draw)
    output = traces[-1].outputs
    if return_hidden:
        return output, [t.outputs for t in traces]
    return output


def collapse_weights(W: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Ξ = W Ω, the single linear map equivalent to W^(l) followed by Ω^(l+1)."""
    return matmul(W, omega)


@dataclass
class PredictiveSummary:
    """Monte Carlo predictive distribution over q(W).

    Attributes:
        task: Regression or classification.
        samples: (S, n, D_out) latent outputs (logits for classification).
        noise_var: λ for regression, None for classification.
    """

    task: Task
    samples: np.ndarray
    noise_var: float | None = None
    _probs: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[0])

    @property
    def mean(self) -> np.ndarray:
        """Mixture mean (regression) or averaged class probabilities (classification)."""
        if self.task is Task.CLASSIFICATION:
            return self.probs
        return self.samples.mean(axis=0)

    @property
    def variance(self) -> np.ndarray:
        """Mixture variance including the likelihood noise λ."""
        if self.task is Task.CLASSIFICATION:
            raise ValueError("variance is defined for regression only")
        return self.samples.var(axis=0) + float(self.noise_var or 0.0)

    @property
    def probs(self) -> np.ndarray:
        if self.task is not Task.CLASSIFICATION:
            raise ValueError("class probabilities are defined for classification only")
        if self._probs is None:
            self._probs = np.exp(log_softmax(self.samples)).mean(axis=0)
        return self._probs

    @property
    def labels(self) -> np.ndarray:
        return np.argmax(self.probs, axis=-1)

    def log_density(self, truth: np.ndarray) -> np.ndarray:
        """Per-point log predictive density / probability (log-mean-exp over samples).

        Args:
            truth: (n, D_out) targets for regression, (n,) labels for classification.

        Returns:
            (n,) array.
        """
        if self.task is Task.CLASSIFICATION:
            terms = softmax_loglik_terms(np.asarray(truth, dtype=np.int64), self.samples)
        else:
            assert self.noise_var is not None
            terms = gaussian_loglik_terms(
                np.asarray(truth, dtype=np.float64), self.samples, float(np.log(self.noise_var))
            )
        return logsumexp(terms, axis=0) - np.log(self.n_samples)


def predict(model: DgpModel, X: np.ndarray, n_mc: int, rng: Rng) -> PredictiveSummary:
    """MC predictive mixture at X using one shared weight draw of ``n_mc`` samples.

    Args:
        model: Trained model.
        X: (n, D_in) inputs.
        n_mc: Number of MC samples (>= 1).
        rng: Stream for the weight draw.

    Returns:
        PredictiveSummary over all rows of X.
    """
    if n_mc < 1:
        raise ValueError(f"n_mc must be >= 1, got {n_mc}")
    X = np.asarray(X, dtype=np.float64)
    draw = sample_weights(model, rng, n_mc)
    parts = [
        forward(model, X[start : start + PREDICT_CHUNK_ROWS], draw)
        for start in range(0, X.shape[0], PREDICT_CHUNK_ROWS)
    ]
    samples = np.concatenate(parts, axis=1)  # type: ignore[arg-type]
    noise = model.noise_var if model.spec.likelihood.has_noise else None
    return PredictiveSummary(task=model.spec.task, samples=samples, noise_var=noise)

