"""Training never factorizes or inverts a matrix."""

import re
from pathlib import Path

import numpy as np
import pytest
import scipy.linalg

import dgprf
from dgprf.inference.trainer import TrainSchedule, train
from dgprf.numerics.rng import Rng

PACKAGE = Path(dgprf.__file__).parent
TRAINING_PACKAGES = ("inference", "model", "kernels", "numerics")
FORBIDDEN = re.compile(r"\b(cholesky|cho_factor|cho_solve|solve|inv|pinv|eigh?|qr|svd|lstsq|lu_factor)\s*\(")


def test_training_sources_have_no_factorizations():
    offenders = []
    for sub in TRAINING_PACKAGES:
        for path in (PACKAGE / sub).rglob("*.py"):
            for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
                if FORBIDDEN.search(line):
                    offenders.append(f"{path.name}:{lineno}: {line.strip()}")
    assert offenders == []


def _forbidden(*args, **kwargs):
    raise AssertionError("matrix factorization called during training")


@pytest.mark.parametrize(
    "module,name",
    [
        (np.linalg, "cholesky"),
        (np.linalg, "solve"),
        (np.linalg, "inv"),
        (np.linalg, "eigh"),
        (np.linalg, "svd"),
        (np.linalg, "qr"),
        (scipy.linalg, "cholesky"),
        (scipy.linalg, "cho_factor"),
        (scipy.linalg, "solve"),
        (scipy.linalg, "inv"),
    ],
)
def test_training_runs_with_factorizations_disabled(monkeypatch, make_model, regression_data, module, name):
    monkeypatch.setattr(module, name, _forbidden)
    schedule = TrainSchedule(
        total_iters=12, theta_freeze_iters=4, mc_samples_phase2=2, batch_size=10, eval_mc=3,
        metrics_every=6,
    )
    result = train(make_model(), regression_data, schedule, Rng(0))
    assert np.isfinite(result.final_row.elbo)
