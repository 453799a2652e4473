"""Minimal dense linear algebra.

A Matrix throughout dgprf is a 2-D ``numpy.ndarray`` of float64 in C
(row-major) order. Stacks of Monte Carlo samples use a leading sample axis,
``(n_samples, rows, cols)``.

Public API:
    as_matrix(values, name="matrix") -> np.ndarray
    matmul(a, b) -> np.ndarray
"""

from __future__ import annotations

from typing import Any

import numpy as np

from dgprf.exceptions import ShapeError

__all__ = ["as_matrix", "matmul"]


def as_matrix(values: Any, name: str = "matrix") -> np.ndarray:
    """Coerce ``values`` to a finite 2-D float64 array.

    1-D input is treated as a single column.

    Args:
        values: Array-like input.
        name: Label used in error messages.

    Returns:
        C-contiguous float64 array with ``ndim == 2``.

    Raises:
        ShapeError: If the input has more than two dimensions or non-finite entries.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim > 2:
        raise ShapeError(f"{name} must be at most 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(arr)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Standard matrix product with an explicit shape contract.

    Args:
        a: Left operand of shape (n, k).
        b: Right operand of shape (k, p).

    Returns:
        Product of shape (n, p).

    Raises:
        ShapeError: If ``a.cols != b.rows`` or either operand is not 2-D.
    """
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul dimension mismatch: {a.shape} x {b.shape}")
    return a @ b
