"""MCMC reference sampler for the collapsed two-layer DGP."""

from dgprf.mcmc.collapsed import (
    CollapsedHypers,
    CollapsedState,
    collapsed_loglik,
    f2_conditional_moments,
    sample_f2_conditional,
)
from dgprf.mcmc.ess import ess_step
from dgprf.mcmc.gibbs import GibbsSamples, gibbs_run
from dgprf.mcmc.synthetic import h, synthetic_dataset

__all__ = [
    "CollapsedHypers",
    "CollapsedState",
    "GibbsSamples",
    "collapsed_loglik",
    "ess_step",
    "f2_conditional_moments",
    "gibbs_run",
    "h",
    "sample_f2_conditional",
    "synthetic_dataset",
]
