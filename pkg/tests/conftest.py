"""
Shared pytest fixtures for dgprf tests.
"""

import numpy as np
import pytest

from dgprf.data.dataset import Dataset
from dgprf.kernels.features import OmegaStrategy
from dgprf.kernels.params import KernelFamily
from dgprf.model.architecture import ArchitectureSpec, Task
from dgprf.model.dgp import DgpModel
from dgprf.numerics.rng import Rng


@pytest.fixture
def rng():
    """Fresh seeded stream."""
    return Rng(1234)


@pytest.fixture
def regression_data():
    """
    Smooth 2-D regression problem with 40 points, already on a unit scale.
    """
    gen = np.random.default_rng(0)
    X = gen.uniform(-1.5, 1.5, size=(40, 2))
    Y = np.sin(X[:, :1] * 2.0) + 0.5 * X[:, 1:] + 0.05 * gen.standard_normal((40, 1))
    return Dataset(X=X, Y=Y, task=Task.REGRESSION)


@pytest.fixture
def classification_data():
    """
    Three well-separated Gaussian blobs in 2-D, 20 points each.
    """
    gen = np.random.default_rng(1)
    centers = np.array([[-2.0, 0.0], [2.0, 0.0], [0.0, 2.5]])
    X = np.concatenate([c + 0.3 * gen.standard_normal((20, 2)) for c in centers])
    Y = np.repeat(np.arange(3), 20)
    return Dataset(X=X, Y=Y, task=Task.CLASSIFICATION, n_classes=3)


@pytest.fixture
def make_model():
    """
    Factory for small models with non-trivial variational parameters.

    W (and q(Ω)) log-variances are raised so that gradients through the noise
    are not negligible, and means are randomized.
    """

    def _make(
        d_in=2,
        d_out=1,
        n_layers=2,
        gp_per_layer=3,
        n_rf=8,
        kernel=KernelFamily.RBF,
        strategy=OmegaStrategy.VAR_FIXED,
        feedforward=False,
        task=Task.REGRESSION,
        seed=7,
        log_var=-2.0,
    ):
        spec = ArchitectureSpec.build(
            d_in=d_in,
            d_out=d_out,
            n_layers=n_layers,
            gp_per_layer=gp_per_layer,
            n_rf=n_rf,
            kernel=kernel,
            omega_strategy=strategy,
            feedforward_inputs=feedforward,
            task=task,
        )
        model = DgpModel.initialize(spec, Rng(seed))
        gen = np.random.default_rng(seed)
        params = model.parameters()
        for key, value in params.items():
            if key.startswith("w_mean"):
                params[key] = 0.5 * gen.standard_normal(value.shape)
            elif key.startswith("w_log_var"):
                params[key] = np.full(value.shape, log_var) + 0.1 * gen.standard_normal(value.shape)
            elif key.startswith("omega_mean"):
                params[key] = value + 0.3 * gen.standard_normal(value.shape)
            elif key.startswith("omega_log_var"):
                params[key] = value - 1.0 + 0.1 * gen.standard_normal(value.shape)
            elif key.startswith("log_lengthscales"):
                params[key] = value + 0.1 * gen.standard_normal(value.shape)
            elif key.startswith("log_sigma2"):
                params[key] = np.array(0.2)
        if "noise_log_var" in params:
            params["noise_log_var"] = np.array(np.log(0.1))
        return model.with_parameters(params)

    return _make


@pytest.fixture
def regression_csv(tmp_path):
    """
    CSV with a header, two inputs and a target column ``y`` (60 rows).
    """
    gen = np.random.default_rng(3)
    x = gen.uniform(-2, 2, size=(60, 2))
    y = np.sin(x[:, 0]) + 0.3 * x[:, 1] + 0.05 * gen.standard_normal(60)
    path = tmp_path / "regression.csv"
    lines = ["x1,x2,y"] + [f"{float(a)!r},{float(b)!r},{float(c)!r}" for (a, b), c in zip(x, y)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
