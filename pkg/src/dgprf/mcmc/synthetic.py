"""Synthetic regression data from a composition of two bumps."""

from __future__ import annotations

import numpy as np

from dgprf.numerics.rng import Rng

__all__ = ["h", "synthetic_dataset", "SYNTHETIC_RANGE", "SYNTHETIC_NOISE_VAR"]

SYNTHETIC_RANGE = (-3.0, 3.0)
SYNTHETIC_NOISE_VAR = 0.01


def h(x: np.ndarray | float) -> np.ndarray:
    """h(x) = 2x exp(-x²)."""
    x = np.asarray(x, dtype=np.float64)
    return 2.0 * x * np.exp(-x * x)


def synthetic_dataset(
    n: int, rng: Rng, noise_var: float = SYNTHETIC_NOISE_VAR
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` points with x ~ U[-3, 3] and y ~ N(h(h(x)), noise_var).

    Returns:
        ``(X, Y)`` of shapes (n, 1) and (n, 1).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    low, high = SYNTHETIC_RANGE
    X = rng.uniform(low, high, (n, 1))
    Y = h(h(X)) + np.sqrt(noise_var) * rng.standard_normal((n, 1))
    return X, Y
