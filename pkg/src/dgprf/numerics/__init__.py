"""Dense linear algebra helpers and the seeded random generator."""

from dgprf.numerics.gaussian import GaussianVariational
from dgprf.numerics.linalg import as_matrix, matmul
from dgprf.numerics.rng import Rng, randn

__all__ = ["GaussianVariational", "Rng", "as_matrix", "matmul", "randn"]
