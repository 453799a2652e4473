"""Variational random-feature DGPs against the Gibbs sampler on synthetic data.

Two 2-layer var-fixed RBF models (one hidden GP) are trained with 50 and 10
spectral frequencies. The hyperparameters of the 50-frequency model are then
frozen and handed to the collapsed Gibbs sampler, and both predictives are
evaluated on a regular grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
import pandas as pd

from dgprf.data.dataset import Dataset
from dgprf.inference.trainer import TrainSchedule, train
from dgprf.kernels.features import OmegaStrategy
from dgprf.kernels.params import KernelFamily
from dgprf.mcmc.collapsed import CollapsedHypers
from dgprf.mcmc.gibbs import GibbsSamples, gibbs_run
from dgprf.mcmc.synthetic import SYNTHETIC_RANGE, synthetic_dataset
from dgprf.model.architecture import ArchitectureSpec
from dgprf.model.dgp import DgpModel, forward, sample_weights
from dgprf.numerics.rng import Rng

logger = logging.getLogger(__name__)

__all__ = ["CompareSettings", "CompareResult", "run_comparison", "align_signs", "COMPARE_FEATURES"]

# (reference model, coarse model)
COMPARE_FEATURES = (50, 10)


@dataclass(frozen=True)
class CompareSettings:
    """Knobs of the comparison.

    Attributes:
        n_points: Synthetic training points.
        grid_points: Evaluation grid size over the synthetic input range.
        mcmc_samples: Retained Gibbs samples.
        burn_in: Discarded Gibbs sweeps.
        thin: Sweeps per retained sample.
        predictive_samples: Weight draws of each variational predictive.
    """

    n_points: int = 50
    grid_points: int = 100
    mcmc_samples: int = 100
    burn_in: int = 500
    thin: int = 5
    predictive_samples: int = 100


@dataclass
class CompareResult:
    table: pd.DataFrame
    summary: dict[str, Any]
    models: dict[int, DgpModel]
    chain: GibbsSamples


def align_signs(samples: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Flip each row of ``samples`` so that it correlates positively with ``reference``."""
    signs = np.where(samples @ reference < 0, -1.0, 1.0)
    return samples * signs[:, None]


def _rmse(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.mean((a - b) ** 2)))


def run_comparison(
    seed: int, schedule: TrainSchedule, settings: CompareSettings | None = None
) -> CompareResult:
    """Train both variational models, run the sampler and tabulate the grid.

    Args:
        seed: Run seed; data, training, sampling and prediction use derived streams.
        schedule: Training schedule; the batch size is capped at the data size.
        settings: Comparison knobs.

    Returns:
        CompareResult whose table has columns x, vi50_mean, vi50_std, vi10_mean,
        vi10_std, mcmc_mean, mcmc_std, vi50_hidden_mean, mcmc_hidden_mean.
    """
    settings = settings or CompareSettings()
    X, Y = synthetic_dataset(settings.n_points, Rng(seed, (4,)))
    data = Dataset(X=X, Y=Y)
    grid = np.linspace(*SYNTHETIC_RANGE, settings.grid_points)[:, None]
    schedule = replace(schedule, batch_size=min(schedule.batch_size, settings.n_points))

    models: dict[int, DgpModel] = {}
    table: dict[str, np.ndarray] = {"x": grid[:, 0]}
    hidden: dict[int, np.ndarray] = {}
    for n_rf in COMPARE_FEATURES:
        spec = ArchitectureSpec.build(
            d_in=1,
            d_out=1,
            n_layers=2,
            gp_per_layer=1,
            n_rf=n_rf,
            kernel=KernelFamily.RBF,
            omega_strategy=OmegaStrategy.VAR_FIXED,
        )
        model = DgpModel.initialize(spec, Rng(seed, (5, n_rf)))
        result = train(model, data, schedule, Rng(seed, (6, n_rf)), wall_clock=False)
        models[n_rf] = result.model
        draw = sample_weights(result.model, Rng(seed, (7, n_rf)), settings.predictive_samples)
        output, layers = forward(result.model, grid, draw, return_hidden=True)
        table[f"vi{n_rf}_mean"] = output[:, :, 0].mean(axis=0)
        table[f"vi{n_rf}_std"] = output[:, :, 0].std(axis=0)
        hidden[n_rf] = layers[0][:, :, 0].mean(axis=0)
        logger.info("variational model with %d frequencies trained", n_rf)

    reference = models[COMPARE_FEATURES[0]]
    hypers = CollapsedHypers(
        theta0=reference.theta[0], theta1=reference.theta[1], noise_var=reference.noise_var
    )
    chain = gibbs_run(
        X,
        Y,
        hypers,
        n_samples=settings.mcmc_samples,
        burn_in=settings.burn_in,
        rng=Rng(seed, (8,)),
        thin=settings.thin,
        X_test=grid,
    )
    vi_hidden = hidden[COMPARE_FEATURES[0]]
    table["mcmc_mean"] = chain.predictive_mean()
    table["mcmc_std"] = chain.predictive_std()
    table["vi50_hidden_mean"] = vi_hidden
    table["mcmc_hidden_mean"] = align_signs(chain.f1_test, vi_hidden).mean(axis=0)

    frame = pd.DataFrame(table)
    fine, coarse = COMPARE_FEATURES
    summary = {
        "seed": seed,
        "n_points": settings.n_points,
        "mcmc_samples": chain.n_samples,
        f"rmse_mcmc_vs_vi{fine}": _rmse(frame["mcmc_mean"], frame[f"vi{fine}_mean"]),
        f"rmse_mcmc_vs_vi{coarse}": _rmse(frame["mcmc_mean"], frame[f"vi{coarse}_mean"]),
        "rmse_hidden_aligned": _rmse(frame["mcmc_hidden_mean"], frame["vi50_hidden_mean"]),
        f"mean_std_vi{fine}": float(frame[f"vi{fine}_std"].mean()),
        f"mean_std_vi{coarse}": float(frame[f"vi{coarse}_std"].mean()),
        "mean_std_mcmc": float(frame["mcmc_std"].mean()),
        "hypers": {
            "log_sigma2": [hypers.theta0.log_sigma2, hypers.theta1.log_sigma2],
            "log_lengthscales": [
                hypers.theta0.log_lengthscales.tolist(),
                hypers.theta1.log_lengthscales.tolist(),
            ],
            "noise_var": hypers.noise_var,
        },
    }
    return CompareResult(table=frame, summary=summary, models=models, chain=chain)
