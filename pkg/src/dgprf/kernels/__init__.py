"""Exact covariance functions and their random feature expansions."""

from dgprf.kernels.covariance import arccos_j, arccos_kernel, kernel_matrix, rbf_kernel
from dgprf.kernels.features import (
    OmegaStrategy,
    SpectralBlock,
    approx_gram,
    phi,
    phi_arc,
    phi_rbf,
    sample_spectral,
)
from dgprf.kernels.params import KernelFamily, KernelParams

__all__ = [
    "KernelFamily",
    "KernelParams",
    "OmegaStrategy",
    "SpectralBlock",
    "approx_gram",
    "arccos_j",
    "arccos_kernel",
    "kernel_matrix",
    "phi",
    "phi_arc",
    "phi_rbf",
    "rbf_kernel",
    "sample_spectral",
]
