"""Seeded, reproducible random number generation.

Every stochastic quantity in dgprf (weight noise, spectral frequencies,
minibatch order, MCMC proposals) is drawn from an :class:`Rng`. The stream is
numpy's ``PCG64`` bit generator seeded through ``SeedSequence``; normal draws
use numpy's ziggurat transform (``Generator.standard_normal``). Both are
fixed, documented algorithms, so identical seeds give bit-identical streams.

Public API:
    Rng(seed, key=())
    randn(rng, rows, cols) -> np.ndarray
"""

from __future__ import annotations

from typing import Any

import numpy as np

__all__ = ["Rng", "randn"]


class Rng:
    """Single-owner random stream.

    Args:
        seed: 64-bit unsigned seed.
        key: Optional spawn key; ``Rng(s, (k,))`` is an independent stream
            derived from ``s``. Used to give evaluation and data splitting
            their own streams so they never perturb the training stream.
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()) -> None:
        if seed < 0 or seed >= 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def derive(self, tag: int) -> Rng:
        """Return an independent child stream keyed by ``tag``."""
        return Rng(self.seed, self.key + (tag,))

    def standard_normal(self, shape: tuple[int, ...]) -> np.ndarray:
        """Draw i.i.d. N(0, 1) values of the given shape."""
        return self._generator.standard_normal(shape)

    def uniform(self, low: float = 0.0, high: float = 1.0, size: Any = None) -> Any:
        """Draw uniform values on ``[low, high)``."""
        return self._generator.uniform(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        """Return a uniformly random permutation of ``range(n)`` (Fisher-Yates)."""
        return self._generator.permutation(n)

    def integers(self, low: int, high: int, size: Any = None) -> Any:
        """Draw integers on ``[low, high)``."""
        return self._generator.integers(low, high, size)

    @property
    def state(self) -> dict[str, Any]:
        """Bit-generator state (JSON-serializable)."""
        return dict(self._generator.bit_generator.state)

    @state.setter
    def state(self, value: dict[str, Any]) -> None:
        self._generator.bit_generator.state = value


def randn(rng: Rng, rows: int, cols: int) -> np.ndarray:
    """Matrix of i.i.d. standard normal entries.

    Args:
        rng: Stream to draw from (advanced in place).
        rows: Number of rows.
        cols: Number of columns.

    Returns:
        float64 array of shape (rows, cols).
    """
    return rng.standard_normal((rows, cols))
