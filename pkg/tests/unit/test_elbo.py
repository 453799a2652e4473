import numpy as np
import pytest

from dgprf.exceptions import ShapeError
from dgprf.inference.elbo import elbo_and_grad, elbo_minibatch, grad_elbo
from dgprf.inference.kl import kl_posterior_to_prior
from dgprf.kernels.features import OmegaStrategy, activate
from dgprf.kernels.params import KernelFamily
from dgprf.model.architecture import Task
from dgprf.model.dgp import forward, sample_weights
from dgprf.model.likelihoods import gaussian_loglik_terms
from dgprf.numerics.gaussian import LOG_VAR_MIN
from dgprf.numerics.rng import Rng


def _batch(n=10, d_in=2, seed=0):
    gen = np.random.default_rng(seed)
    X = gen.standard_normal((n, d_in))
    Y = np.sin(X[:, :1]) + 0.1 * gen.standard_normal((n, 1))
    return X, Y


def _finite_difference_audit(model, batch, n_total, n_mc, seed, h=1e-5):
    """Fraction of entries whose analytic gradient matches central differences."""
    grads = grad_elbo(model, batch, n_total, n_mc, Rng(seed))
    params = model.parameters()
    ok = 0
    count = 0
    for key, grad in grads.items():
        flat = params[key].reshape(-1)
        for i in range(flat.size):
            plus = {k: v.copy() for k, v in params.items()}
            minus = {k: v.copy() for k, v in params.items()}
            plus[key].reshape(-1)[i] += h
            minus[key].reshape(-1)[i] -= h
            up = elbo_minibatch(model.with_parameters(plus), batch, n_total, n_mc, Rng(seed)).total
            down = elbo_minibatch(model.with_parameters(minus), batch, n_total, n_mc, Rng(seed)).total
            fd = (up - down) / (2 * h)
            count += 1
            if abs(grad.reshape(-1)[i] - fd) <= 1e-4 * abs(fd) + 1e-6:
                ok += 1
    return ok / count


def test_total_is_data_fit_minus_kl(make_model):
    model = make_model()
    est = elbo_minibatch(model, _batch(), n_total=50, n_mc=3, rng=Rng(0))
    assert est.total == pytest.approx(est.data_fit - est.kl_w - est.kl_omega, abs=1e-10)
    kl_w, kl_omega = kl_posterior_to_prior(model)
    assert est.kl_w == kl_w and est.kl_omega == kl_omega


def test_data_fit_matches_direct_enumeration(make_model):
    model = make_model()
    X, Y = _batch(n=2)
    est = elbo_minibatch(model, (X, Y), n_total=8, n_mc=5, rng=Rng(3))
    F = forward(model, X, sample_weights(model, Rng(3), 5))
    manual = 0.0
    for r in range(5):
        for k in range(2):
            manual += gaussian_loglik_terms(Y[k], F[r, k], model.noise_log_var)
    manual *= 8 / (2 * 5)
    assert est.data_fit == pytest.approx(manual, abs=1e-10)


def test_value_and_gradient_share_the_draw(make_model):
    model = make_model()
    batch = _batch()
    a = elbo_minibatch(model, batch, 30, 4, Rng(11))
    b, _ = elbo_and_grad(model, batch, 30, 4, Rng(11))
    assert a.total == pytest.approx(b.total, abs=1e-10)


def test_near_deterministic_weights_reduce_to_plain_likelihood(make_model):
    model = make_model(n_layers=1, strategy=OmegaStrategy.PRIOR_FIXED)
    params = model.parameters()
    params["w_log_var.0"] = np.full_like(params["w_log_var.0"], LOG_VAR_MIN)
    model = model.with_parameters(params)
    X, Y = _batch()
    est = elbo_minibatch(model, (X, Y), n_total=10, n_mc=1, rng=Rng(0))
    theta = model.theta[0]
    omega = model.spectral[0].omega_values(theta)
    F = activate(X @ omega, theta.family, theta.sigma2) @ model.w_posterior[0].mean
    expected = gaussian_loglik_terms(Y, F, model.noise_log_var).sum()
    assert est.data_fit == pytest.approx(expected, rel=1e-3)


def test_prior_fixed_has_zero_omega_kl(make_model):
    model = make_model(strategy=OmegaStrategy.PRIOR_FIXED)
    assert elbo_minibatch(model, _batch(), 10, 1, Rng(0)).kl_omega == 0.0


@pytest.mark.parametrize("strategy", list(OmegaStrategy))
def test_gradient_matches_finite_differences_rbf(make_model, strategy):
    model = make_model(n_layers=3, gp_per_layer=[3, 3], n_rf=20, strategy=strategy)
    assert _finite_difference_audit(model, _batch(), n_total=10, n_mc=2, seed=5) == 1.0


@pytest.mark.parametrize("strategy", list(OmegaStrategy))
def test_gradient_matches_finite_differences_arc(make_model, strategy):
    model = make_model(
        n_layers=3, gp_per_layer=[3, 3], n_rf=20, kernel=KernelFamily.ARC_COSINE, strategy=strategy
    )
    # ReLU kinks can sit inside the difference interval
    assert _finite_difference_audit(model, _batch(), n_total=10, n_mc=2, seed=5) >= 0.99


def test_gradient_classification(make_model):
    model = make_model(d_out=3, task=Task.CLASSIFICATION, n_rf=6)
    X = np.random.default_rng(1).standard_normal((8, 2))
    Y = np.array([0, 1, 2, 0, 1, 2, 0, 1])
    assert _finite_difference_audit(model, (X, Y), n_total=8, n_mc=2, seed=2) == 1.0


def test_gradient_feedforward(make_model):
    model = make_model(n_layers=2, gp_per_layer=2, n_rf=6, feedforward=True)
    assert _finite_difference_audit(model, _batch(), n_total=10, n_mc=2, seed=4) == 1.0


def test_gradient_covers_every_parameter(make_model):
    model = make_model(strategy=OmegaStrategy.VAR_RESAMPLED)
    grads = grad_elbo(model, _batch(), 10, 2, Rng(0))
    assert set(grads) == set(model.parameters())
    for key, value in model.parameters().items():
        assert grads[key].shape == value.shape


def test_more_samples_lower_variance(make_model):
    model = make_model(strategy=OmegaStrategy.VAR_RESAMPLED)
    batch = _batch()
    one = [elbo_minibatch(model, batch, 10, 1, Rng(s)).total for s in range(50)]
    many = [elbo_minibatch(model, batch, 10, 100, Rng(s)).total for s in range(50)]
    assert np.var(many) < np.var(one)


def test_bad_batches(make_model):
    model = make_model()
    X, Y = _batch()
    with pytest.raises(ShapeError):
        elbo_minibatch(model, (X, Y[:5]), 10, 1, Rng(0))
    with pytest.raises(ShapeError):
        elbo_minibatch(model, (X[:, :1], Y), 10, 1, Rng(0))
    with pytest.raises(ValueError):
        elbo_minibatch(model, (X, Y), 10, 0, Rng(0))
