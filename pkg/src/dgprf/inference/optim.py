"""Adam, run as gradient ascent on the ELBO."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from dgprf.exceptions import ShapeError

__all__ = ["AdamState", "adam_step"]


@dataclass
class AdamState:
    """Moment accumulators for every parameter array.

    Step counts are kept per parameter, so arrays frozen for the first part
    of training start with fresh bias correction when they are released.

    Attributes:
        learning_rate: Step size.
        beta1: First-moment decay.
        beta2: Second-moment decay.
        eps: Denominator floor.
        first: First moments, keyed like the parameters.
        second: Second moments.
        steps: Updates applied to each parameter.
    """

    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    first: dict[str, np.ndarray] = field(default_factory=dict)
    second: dict[str, np.ndarray] = field(default_factory=dict)
    steps: dict[str, int] = field(default_factory=dict)

    @classmethod
    def create(cls, params: dict[str, np.ndarray], learning_rate: float = 0.01) -> AdamState:
        if learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {learning_rate}")
        return cls(
            learning_rate=learning_rate,
            first={k: np.zeros_like(v, dtype=np.float64) for k, v in params.items()},
            second={k: np.zeros_like(v, dtype=np.float64) for k, v in params.items()},
            steps={k: 0 for k in params},
        )

    @property
    def step(self) -> int:
        """Largest per-parameter step count."""
        return max(self.steps.values(), default=0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "first": {k: v.tolist() for k, v in self.first.items()},
            "second": {k: v.tolist() for k, v in self.second.items()},
            "steps": dict(self.steps),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> AdamState:
        return cls(
            learning_rate=float(data["learning_rate"]),
            beta1=float(data["beta1"]),
            beta2=float(data["beta2"]),
            eps=float(data["eps"]),
            first={k: np.asarray(v, dtype=np.float64) for k, v in data["first"].items()},
            second={k: np.asarray(v, dtype=np.float64) for k, v in data["second"].items()},
            steps={k: int(v) for k, v in data["steps"].items()},
        )


def adam_step(
    state: AdamState,
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    frozen: Iterable[str] = (),
) -> dict[str, np.ndarray]:
    """One Adam ascent step.

    Args:
        state: Optimizer state, updated in place.
        params: Current parameters (not modified).
        grads: ELBO gradients with the same keys and shapes.
        frozen: Keys whose gradients are ignored this step; their moments
            and step counts are left untouched.

    Returns:
        New parameter dict.

    Raises:
        ShapeError: If a gradient is missing or its shape differs from the parameter's.
    """
    frozen = set(frozen)
    updated: dict[str, np.ndarray] = {}
    for key, value in params.items():
        if key not in grads:
            raise ShapeError(f"no gradient supplied for parameter '{key}'")
        grad = np.asarray(grads[key], dtype=np.float64)
        if grad.shape != np.shape(value):
            raise ShapeError(f"gradient for '{key}' has shape {grad.shape}, expected {np.shape(value)}")
        if key in frozen:
            updated[key] = np.array(value, dtype=np.float64)
            continue
        if key not in state.first:
            state.first[key] = np.zeros_like(grad)
            state.second[key] = np.zeros_like(grad)
            state.steps[key] = 0
        state.steps[key] += 1
        t = state.steps[key]
        state.first[key] = state.beta1 * state.first[key] + (1.0 - state.beta1) * grad
        state.second[key] = state.beta2 * state.second[key] + (1.0 - state.beta2) * grad * grad
        m_hat = state.first[key] / (1.0 - state.beta1**t)
        v_hat = state.second[key] / (1.0 - state.beta2**t)
        updated[key] = value + state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
    return updated
