"""Elliptical slice sampling for latent vectors with a zero-mean Gaussian prior."""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from dgprf.exceptions import NumericalError
from dgprf.mcmc.collapsed import CollapsedState

logger = logging.getLogger(__name__)

__all__ = ["ess_step", "MAX_SHRINKS"]

MAX_SHRINKS = 1000


def ess_step(state: CollapsedState, loglik: Callable[[np.ndarray], float]) -> CollapsedState:
    """One elliptical slice update of ``state.f1``.

    Draws an ellipse through the current point and a prior sample, sets the
    slice level log y = L(f) + log u, and shrinks the angle bracket
    [θ - 2π, θ] around 0 until a point above the level is found.

    Args:
        state: Current chain state (its rng is advanced).
        loglik: Log-likelihood L(f).

    Returns:
        New state with the accepted point and its cached log-likelihood.

    Raises:
        NumericalError: After MAX_SHRINKS rejected proposals.
    """
    rng = state.rng
    f = state.f1
    current = loglik(f) if state.loglik is None else state.loglik
    nu = state.prior_draw()
    log_y = current + np.log(rng.uniform())
    theta = rng.uniform(0.0, 2.0 * np.pi)
    lower, upper = theta - 2.0 * np.pi, theta
    for shrink in range(MAX_SHRINKS + 1):
        proposal = f * np.cos(theta) + nu * np.sin(theta)
        value = loglik(proposal)
        if value > log_y:
            if shrink:
                logger.debug("ESS accepted after %d shrinks", shrink)
            return CollapsedState(f1=proposal, chol0=state.chol0, rng=rng, loglik=value)
        if theta < 0.0:
            lower = theta
        else:
            upper = theta
        theta = rng.uniform(lower, upper)
    raise NumericalError(f"elliptical slice sampling exceeded {MAX_SHRINKS} bracket shrinks")
