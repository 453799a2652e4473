"""Variational inference: KL terms, the ELBO and its gradient, Adam and the training loop."""

from dgprf.inference.elbo import ElboEstimate, GradientSet, elbo_and_grad, elbo_minibatch, grad_elbo
from dgprf.inference.kl import kl_gaussian, kl_gradients, kl_posterior_to_prior
from dgprf.inference.optim import AdamState, adam_step
from dgprf.inference.trainer import (
    MetricsCsvWriter,
    MetricsRow,
    TrainResult,
    TrainSchedule,
    TrainState,
    minibatches,
    rank_by_elbo,
    smoothed_elbo,
    train,
)

__all__ = [
    "AdamState",
    "ElboEstimate",
    "GradientSet",
    "MetricsCsvWriter",
    "MetricsRow",
    "TrainResult",
    "TrainSchedule",
    "TrainState",
    "adam_step",
    "elbo_and_grad",
    "elbo_minibatch",
    "grad_elbo",
    "kl_gaussian",
    "kl_gradients",
    "kl_posterior_to_prior",
    "minibatches",
    "rank_by_elbo",
    "smoothed_elbo",
    "train",
]
