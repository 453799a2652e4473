import numpy as np
import pytest
from scipy import stats

from dgprf.exceptions import NumericalError, ShapeError
from dgprf.inference.trainer import TrainSchedule
from dgprf.kernels.covariance import kernel_matrix
from dgprf.kernels.params import KernelParams
from dgprf.mcmc.collapsed import (
    CollapsedHypers,
    CollapsedState,
    cholesky_lower,
    collapsed_loglik,
    f2_conditional_moments,
    sample_f2_conditional,
)
from dgprf.mcmc.compare import CompareSettings, run_comparison
from dgprf.mcmc.ess import ess_step
from dgprf.mcmc.gibbs import gibbs_run
from dgprf.mcmc.synthetic import SYNTHETIC_RANGE, h, synthetic_dataset
from dgprf.numerics.rng import Rng

UNIT_1D = KernelParams(0.0, np.zeros(1))


def test_h_values():
    assert float(h(1.0)) == pytest.approx(2.0 * np.exp(-1.0))
    assert float(h(1.0)) == pytest.approx(0.735759, abs=1e-6)
    assert float(h(h(1.0))) == pytest.approx(0.85638, abs=1e-4)
    assert float(h(0.0)) == 0.0


def test_synthetic_dataset():
    X, Y = synthetic_dataset(200, Rng(0))
    assert X.shape == Y.shape == (200, 1)
    low, high = SYNTHETIC_RANGE
    assert X.min() >= low and X.max() < high
    residual = Y - h(h(X))
    assert residual.std() == pytest.approx(0.1, rel=0.2)


def test_scalar_loglik_matches_normal():
    theta1 = KernelParams(np.log(0.7), np.zeros(1))
    value = collapsed_loglik(np.array([0.3]), np.array([1.2]), theta1, 0.2)
    assert value == pytest.approx(stats.norm.logpdf(1.2, 0.0, np.sqrt(0.9)), rel=1e-12)


def test_loglik_matches_multivariate_normal():
    gen = np.random.default_rng(0)
    f1 = gen.standard_normal(6)
    y = gen.standard_normal(6)
    theta1 = KernelParams(np.log(1.3), np.log(np.array([0.8])))
    cov = kernel_matrix(f1[:, None], theta1) + 0.05 * np.eye(6)
    expected = stats.multivariate_normal(np.zeros(6), cov).logpdf(y)
    assert collapsed_loglik(f1, y, theta1, 0.05) == pytest.approx(expected, rel=1e-10)


def test_loglik_is_sign_invariant():
    gen = np.random.default_rng(1)
    f1 = gen.standard_normal(8)
    y = gen.standard_normal((8, 1))
    a = collapsed_loglik(f1, y, UNIT_1D, 0.1)
    b = collapsed_loglik(-f1, y, UNIT_1D, 0.1)
    assert a == pytest.approx(b, abs=1e-12)


def test_loglik_length_mismatch():
    with pytest.raises(ShapeError):
        collapsed_loglik(np.zeros(3), np.zeros(4), UNIT_1D, 0.1)


def test_f2_conditional_single_point():
    mean, cov = f2_conditional_moments(np.array([0.0]), np.array([2.0]), UNIT_1D, 1.0)
    assert mean[0] == pytest.approx(1.0)
    assert cov[0, 0] == pytest.approx(0.5)


def test_f2_conditional_noise_limits():
    f1 = np.array([-1.0, 0.0, 1.5])
    y = np.array([0.3, -0.2, 0.8])
    mean, cov = f2_conditional_moments(f1, y, UNIT_1D, 1e-10)
    np.testing.assert_allclose(mean, y, atol=1e-6)
    np.testing.assert_allclose(cov, 0.0, atol=1e-6)
    mean, cov = f2_conditional_moments(f1, y, UNIT_1D, 1e10)
    np.testing.assert_allclose(mean, 0.0, atol=1e-8)
    np.testing.assert_allclose(cov, kernel_matrix(f1[:, None], UNIT_1D), atol=1e-8)


def test_f2_sample_moments():
    draws = np.array(
        [sample_f2_conditional(np.array([0.0]), np.array([2.0]), UNIT_1D, 1.0, Rng(s))[0] for s in range(4000)]
    )
    se = np.sqrt(0.5 / draws.size)
    assert abs(draws.mean() - 1.0) < 4 * se
    assert draws.var() == pytest.approx(0.5, rel=0.1)


def test_hypers_validation():
    with pytest.raises(ShapeError):
        CollapsedHypers(UNIT_1D, KernelParams(0.0, np.zeros(2)), 0.1)
    with pytest.raises(ValueError):
        CollapsedHypers(UNIT_1D, UNIT_1D, 0.0)


def test_cholesky_failure_is_numerical_error():
    with pytest.raises(NumericalError):
        cholesky_lower(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_ess_accepts_first_proposal_for_flat_likelihood():
    state = CollapsedState.from_prior(np.zeros((1, 1)), UNIT_1D, Rng(0))
    state.loglik = 0.0
    calls = []

    def flat(f):
        calls.append(f)
        return 0.0

    new = ess_step(state, flat)
    assert len(calls) == 1
    assert new.loglik == 0.0


def test_ess_gives_up_after_max_shrinks():
    state = CollapsedState.from_prior(np.zeros((1, 1)), UNIT_1D, Rng(0))
    state.loglik = 0.0
    with pytest.raises(NumericalError):
        ess_step(state, lambda f: -np.inf)


def test_ess_recovers_prior_for_flat_likelihood():
    X = np.array([[0.0], [1.0]])
    theta0 = KernelParams(np.log(2.0), np.zeros(1))
    state = CollapsedState.from_prior(X, theta0, Rng(3))
    draws = []
    for _ in range(20000):
        state = ess_step(state, lambda f: 0.0)
        draws.append(state.f1)
    draws = np.array(draws)
    K = kernel_matrix(X, theta0)
    np.testing.assert_allclose(draws.var(axis=0), np.diag(K), rtol=0.1)
    corr = np.corrcoef(draws.T)[0, 1]
    assert corr == pytest.approx(np.exp(-0.5), abs=0.05)


@pytest.mark.slow
def test_ess_matches_gaussian_posterior():
    y, noise = 1.0, 0.5
    state = CollapsedState.from_prior(np.zeros((1, 1)), UNIT_1D, Rng(7))
    draws = []
    for i in range(40000):
        state = ess_step(state, lambda f: float(stats.norm.logpdf(y, f[0], np.sqrt(noise))))
        if i % 20 == 0:
            draws.append(state.f1[0])
    post = stats.norm(y / (1.0 + noise), np.sqrt(noise / (1.0 + noise)))
    assert stats.kstest(draws, post.cdf).pvalue > 0.001


def _synthetic_hypers():
    return CollapsedHypers(
        theta0=KernelParams(0.0, np.log(np.array([0.8]))),
        theta1=KernelParams(0.0, np.log(np.array([0.5]))),
        noise_var=0.01,
    )


@pytest.mark.slow
def test_gibbs_fits_synthetic_data():
    X, Y = synthetic_dataset(50, Rng(0))
    grid = np.linspace(-3, 3, 40)[:, None]
    samples = gibbs_run(
        X, Y, _synthetic_hypers(), n_samples=50, burn_in=300, rng=Rng(1), thin=2, X_test=grid
    )
    assert samples.f2_test.shape == (50, 40)
    rmse = np.sqrt(np.mean((samples.predictive_mean() - h(h(grid[:, 0]))) ** 2))
    assert rmse < 0.3
    assert np.all(samples.predictive_std() >= 0)


@pytest.mark.slow
def test_hidden_layer_visits_both_sign_modes():
    X, Y = synthetic_dataset(50, Rng(0))
    signs = set()
    for chain in range(16):
        samples = gibbs_run(X, Y, _synthetic_hypers(), n_samples=5, burn_in=100, rng=Rng(100 + chain))
        signs.add(np.sign(np.corrcoef(samples.f1.mean(axis=0), h(X[:, 0]))[0, 1]))
    assert signs == {-1.0, 1.0}


def test_gibbs_shapes_and_validation():
    X = np.linspace(-1, 1, 6)[:, None]
    Y = np.sin(X)
    samples = gibbs_run(X, Y, _synthetic_hypers(), n_samples=3, burn_in=2, rng=Rng(0))
    assert samples.f1.shape == samples.f2.shape == (3, 6)
    assert samples.f1_test.shape == (3, 0)
    with pytest.raises(ShapeError):
        gibbs_run(X, Y[:4], _synthetic_hypers(), n_samples=1, burn_in=0, rng=Rng(0))
    with pytest.raises(ValueError):
        gibbs_run(X, Y, _synthetic_hypers(), n_samples=0, burn_in=0, rng=Rng(0))


@pytest.mark.slow
def test_variational_models_track_the_sampler_on_synthetic_data():
    schedule = TrainSchedule(
        total_iters=6000,
        theta_freeze_iters=1000,
        mc_samples_phase2=10,
        batch_size=50,
        metrics_every=0,
        eval_mc=10,
    )
    result = run_comparison(0, schedule, CompareSettings())
    summary = result.summary
    assert len(result.table) == 100
    assert summary["mcmc_samples"] == 100
    assert summary["rmse_mcmc_vs_vi50"] <= 0.15
    assert summary["mean_std_vi10"] > summary["mean_std_vi50"]
