import numpy as np
import pytest
from scipy.stats import norm

from dgprf.inference.kl import kl_gaussian, kl_gradients, kl_posterior_to_prior
from dgprf.kernels.features import OmegaStrategy


@pytest.mark.parametrize(
    "args,expected",
    [
        ((0.0, 1.0, 0.0, 1.0), 0.0),
        ((1.0, 1.0, 0.0, 1.0), 0.5),
        ((1.0, 4.0, 0.0, 1.0), 1.306853),
    ],
)
def test_kl_gaussian_values(args, expected):
    assert kl_gaussian(*args) == pytest.approx(expected, abs=1e-6)


def test_kl_gaussian_rejects_nonpositive_variance():
    with pytest.raises(ValueError):
        kl_gaussian(0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        kl_gaussian(0.0, 1.0, 0.0, -1.0)


def test_kl_gaussian_sums_arrays():
    total = kl_gaussian(np.array([1.0, 1.0]), np.array([1.0, 4.0]), 0.0, 1.0)
    assert total == pytest.approx(0.5 + 1.306853, abs=1e-6)


def test_kl_gaussian_matches_monte_carlo():
    m1, v1, m2, v2 = 0.4, 0.7, -0.3, 1.8
    gen = np.random.default_rng(42)
    x = m1 + np.sqrt(v1) * gen.standard_normal(1_000_000)
    log_ratio = norm.logpdf(x, m1, np.sqrt(v1)) - norm.logpdf(x, m2, np.sqrt(v2))
    se = log_ratio.std() / np.sqrt(x.size)
    assert abs(log_ratio.mean() - kl_gaussian(m1, v1, m2, v2)) < 4 * se


def test_prior_fixed_has_no_omega_kl(make_model):
    model = make_model(strategy=OmegaStrategy.PRIOR_FIXED)
    kl_w, kl_omega = kl_posterior_to_prior(model)
    assert kl_omega == 0.0
    assert kl_w > 0.0
    assert not any(k.startswith("log_lengthscales") for k in kl_gradients(model))


def test_posterior_at_prior_has_zero_kl(make_model):
    model = make_model(strategy=OmegaStrategy.VAR_FIXED)
    params = model.parameters()
    for key, value in params.items():
        if key.startswith("w_mean") or key.startswith("w_log_var") or key.startswith("omega_mean"):
            params[key] = np.zeros_like(value)
        elif key.startswith("omega_log_var"):
            layer = key.split(".")[1]
            ell = params[f"log_lengthscales.{layer}"]
            params[key] = np.broadcast_to(-2.0 * ell[:, None], value.shape).copy()
    kl_w, kl_omega = kl_posterior_to_prior(model.with_parameters(params))
    assert kl_w == pytest.approx(0.0, abs=1e-12)
    assert kl_omega == pytest.approx(0.0, abs=1e-10)


def test_omega_kl_matches_elementwise_formula(make_model):
    model = make_model(strategy=OmegaStrategy.VAR_RESAMPLED, n_layers=1)
    q = model.spectral[0].variational
    prior_var = np.exp(-2.0 * model.theta[0].log_lengthscales)[:, None]
    expected = kl_gaussian(q.mean, q.var, 0.0, np.broadcast_to(prior_var, q.shape))
    assert kl_posterior_to_prior(model)[1] == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("strategy", [OmegaStrategy.VAR_FIXED, OmegaStrategy.PRIOR_FIXED])
def test_kl_gradients_finite_difference(make_model, strategy):
    model = make_model(strategy=strategy, n_rf=4)
    grads = kl_gradients(model)
    params = model.parameters()
    h = 1e-6

    def total(p):
        return sum(kl_posterior_to_prior(model.with_parameters(p)))

    for key, grad in grads.items():
        flat = params[key].ravel()
        for i in range(flat.size):
            plus = {k: v.copy() for k, v in params.items()}
            minus = {k: v.copy() for k, v in params.items()}
            plus[key].ravel()[i] += h
            minus[key].ravel()[i] -= h
            fd = (total(plus) - total(minus)) / (2 * h)
            assert grad.ravel()[i] == pytest.approx(fd, rel=1e-5, abs=1e-6), key


def _log_ratio_draws(q_mean, q_var, prior_var, gen, n_draws):
    """Per-draw Σ_ij [log q(x_ij) - log p(x_ij)] for x ~ q, prior N(0, prior_var)."""
    x = q_mean + np.sqrt(q_var) * gen.standard_normal((n_draws, *q_mean.shape))
    log_q = norm.logpdf(x, q_mean, np.sqrt(q_var))
    log_p = norm.logpdf(x, 0.0, np.sqrt(prior_var))
    return (log_q - log_p).reshape(n_draws, -1).sum(axis=1)


@pytest.mark.parametrize("strategy", [OmegaStrategy.VAR_FIXED, OmegaStrategy.VAR_RESAMPLED])
def test_posterior_kl_matches_monte_carlo(make_model, strategy):
    model = make_model(strategy=strategy, n_layers=2, gp_per_layer=2, n_rf=2, log_var=-0.7, seed=11)
    gen = np.random.default_rng(2024)
    params = model.parameters()
    for key in params:
        if key.startswith("log_lengthscales"):
            params[key] = gen.uniform(-0.6, 0.6, size=params[key].shape)
    model = model.with_parameters(params)
    kl_w, kl_omega = kl_posterior_to_prior(model)

    n_chunks, chunk = 10, 100_000
    w_draws, omega_draws = [], []
    for _ in range(n_chunks):
        w_total = np.zeros(chunk)
        omega_total = np.zeros(chunk)
        for layer in range(model.n_layers):
            q_w = model.w_posterior[layer]
            w_total += _log_ratio_draws(q_w.mean, q_w.var, 1.0, gen, chunk)
            q_omega = model.spectral[layer].variational
            prior_var = np.exp(-2.0 * model.theta[layer].log_lengthscales)[:, None]
            omega_total += _log_ratio_draws(q_omega.mean, q_omega.var, prior_var, gen, chunk)
        w_draws.append(w_total)
        omega_draws.append(omega_total)

    for draws, analytic in ((np.concatenate(w_draws), kl_w), (np.concatenate(omega_draws), kl_omega)):
        assert draws.size == 1_000_000
        se = draws.std() / np.sqrt(draws.size)
        assert abs(draws.mean() - analytic) < 4 * se
