"""The random-feature DGP: architecture, likelihoods, sampling, prediction, checkpoints."""

from dgprf.model.architecture import ArchitectureSpec, LayerShape, Task
from dgprf.model.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from dgprf.model.dgp import (
    DgpModel,
    PredictiveSummary,
    WeightDraw,
    collapse_weights,
    forward,
    predict,
    propagate,
    sample_weights,
)
from dgprf.model.likelihoods import (
    LikelihoodKind,
    LikelihoodSpec,
    gaussian_loglik,
    gaussian_loglik_grad,
    softmax_loglik,
    softmax_loglik_grad,
)
from dgprf.numerics.gaussian import GaussianVariational

__all__ = [
    "ArchitectureSpec",
    "Checkpoint",
    "DgpModel",
    "GaussianVariational",
    "LayerShape",
    "LikelihoodKind",
    "LikelihoodSpec",
    "PredictiveSummary",
    "Task",
    "WeightDraw",
    "collapse_weights",
    "forward",
    "gaussian_loglik",
    "gaussian_loglik_grad",
    "load_checkpoint",
    "predict",
    "propagate",
    "sample_weights",
    "save_checkpoint",
    "softmax_loglik",
    "softmax_loglik_grad",
]
