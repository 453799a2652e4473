"""Gibbs sampler for the collapsed two-layer DGP and its predictive at new inputs.

Each sweep updates F^(1) by elliptical slice sampling on the collapsed
likelihood, then draws F^(2) exactly from its Gaussian conditional.
Predictions at test inputs use marginal draws: F^(1)_* from its GP
conditional given the sampled training F^(1), then F^(2)_* from the collapsed
GP predictive given F^(1), F^(1)_* and Y.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from dgprf.exceptions import ShapeError
from dgprf.kernels.covariance import kernel_matrix
from dgprf.mcmc.collapsed import (
    JITTER,
    CollapsedHypers,
    CollapsedState,
    collapsed_loglik,
    sample_f2_conditional,
)
from dgprf.mcmc.ess import ess_step
from dgprf.numerics.rng import Rng

logger = logging.getLogger(__name__)

__all__ = ["GibbsSamples", "gibbs_run", "predictive_draw"]


@dataclass(frozen=True)
class GibbsSamples:
    """Retained draws of one chain.

    Attributes:
        f1: (S, n) hidden-layer samples at the training inputs.
        f2: (S, n) output-layer samples at the training inputs.
        f1_test: (S, n_test) hidden-layer draws at the test inputs (empty without test inputs).
        f2_test: (S, n_test) output-layer draws at the test inputs.
    """

    f1: np.ndarray
    f2: np.ndarray
    f1_test: np.ndarray
    f2_test: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.f1.shape[0])

    def predictive_mean(self) -> np.ndarray:
        return self.f2_test.mean(axis=0)

    def predictive_std(self) -> np.ndarray:
        return self.f2_test.std(axis=0)


def predictive_draw(
    X: np.ndarray,
    Y: np.ndarray,
    X_test: np.ndarray,
    f1: np.ndarray,
    chol0: np.ndarray,
    hypers: CollapsedHypers,
    rng: Rng,
) -> tuple[np.ndarray, np.ndarray]:
    """Marginal draws of (F^(1)_*, F^(2)_*) at ``X_test`` given one chain state."""
    y = np.asarray(Y, dtype=np.float64).reshape(-1)
    cross0 = kernel_matrix(X_test, hypers.theta0, X)
    solved = linalg.cho_solve((chol0, True), cross0.T)
    mean1 = cross0 @ linalg.cho_solve((chol0, True), f1)
    prior1 = np.diag(kernel_matrix(X_test, hypers.theta0))
    var1 = np.maximum(prior1 - np.sum(cross0 * solved.T, axis=1), 0.0)
    f1_test = mean1 + np.sqrt(var1) * rng.standard_normal(mean1.shape)

    K1 = kernel_matrix(f1[:, None], hypers.theta1)
    factor = linalg.cho_factor(K1 + hypers.noise_var * np.eye(f1.shape[0]), lower=True)
    cross1 = kernel_matrix(f1_test[:, None], hypers.theta1, f1[:, None])
    mean2 = cross1 @ linalg.cho_solve(factor, y)
    prior2 = np.diag(kernel_matrix(f1_test[:, None], hypers.theta1))
    var2 = np.maximum(prior2 - np.sum(cross1 * linalg.cho_solve(factor, cross1.T).T, axis=1), 0.0)
    f2_test = mean2 + np.sqrt(var2) * rng.standard_normal(mean2.shape)
    return f1_test, f2_test


def gibbs_run(
    X: np.ndarray,
    Y: np.ndarray,
    hypers: CollapsedHypers,
    n_samples: int,
    burn_in: int,
    rng: Rng,
    thin: int = 1,
    X_test: np.ndarray | None = None,
) -> GibbsSamples:
    """Run one chain and keep every ``thin``-th sweep after ``burn_in``.

    Args:
        X: (n, D) training inputs.
        Y: (n,) or (n, 1) targets.
        hypers: Fixed hyperparameters.
        n_samples: Retained samples.
        burn_in: Discarded leading sweeps.
        rng: Chain stream.
        thin: Sweeps per retained sample.
        X_test: Optional (n_test, D) inputs for predictive draws.

    Returns:
        GibbsSamples.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(Y, dtype=np.float64).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ShapeError(f"X {X.shape} and Y {np.shape(Y)} do not describe the same points")
    if X.shape[1] != hypers.theta0.dim:
        raise ShapeError(f"theta0 has {hypers.theta0.dim} lengthscales for {X.shape[1]} inputs")
    if n_samples < 1 or burn_in < 0 or thin < 1:
        raise ValueError(f"invalid chain length: n_samples={n_samples}, burn_in={burn_in}, thin={thin}")

    def loglik(f1: np.ndarray) -> float:
        return collapsed_loglik(f1, y, hypers.theta1, hypers.noise_var)

    state = CollapsedState.from_prior(X, hypers.theta0, rng)
    n_test = 0 if X_test is None else int(np.asarray(X_test).shape[0])
    f1_out = np.empty((n_samples, X.shape[0]))
    f2_out = np.empty((n_samples, X.shape[0]))
    f1_test = np.empty((n_samples, n_test))
    f2_test = np.empty((n_samples, n_test))

    kept = 0
    sweep = 0
    while kept < n_samples:
        sweep += 1
        state = ess_step(state, loglik)
        f2 = sample_f2_conditional(state.f1, y, hypers.theta1, hypers.noise_var, rng)
        if sweep % 100 == 0:
            logger.debug("sweep %d: loglik %.4f", sweep, state.loglik)
        if sweep <= burn_in or (sweep - burn_in) % thin:
            continue
        f1_out[kept] = state.f1
        f2_out[kept] = f2
        if X_test is not None:
            f1_test[kept], f2_test[kept] = predictive_draw(
                X, y, np.asarray(X_test, dtype=np.float64), state.f1, state.chol0, hypers, rng
            )
        kept += 1
    logger.info("Gibbs chain kept %d samples after %d sweeps", kept, sweep)
    return GibbsSamples(f1=f1_out, f2=f2_out, f1_test=f1_test, f2_test=f2_test)
