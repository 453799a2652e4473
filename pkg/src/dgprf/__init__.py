"""dgprf package initialization.

Deep Gaussian Processes approximated with random feature expansions and
trained with doubly-stochastic variational inference.

Version is read from package metadata (pyproject.toml).
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("dgprf")
except PackageNotFoundError:
    # Package not installed, use fallback for development
    __version__ = "0.0.0.dev0"

__all__ = ["__version__"]
