import numpy as np
import pytest

from dgprf.exceptions import ShapeError
from dgprf.inference.optim import AdamState, adam_step


def test_first_step_moves_by_learning_rate_along_gradient():
    params = {"a": np.array([1.0, -2.0]), "b": np.array(0.5)}
    state = AdamState.create(params, learning_rate=0.1)
    out = adam_step(state, params, {"a": np.array([3.0, -0.2]), "b": np.array(0.0)})
    np.testing.assert_allclose(out["a"], [1.1, -2.1], atol=1e-6)
    assert float(out["b"]) == pytest.approx(0.5)
    assert state.step == 1


def test_ascent_maximizes_concave_function():
    params = {"x": np.array([4.0, -3.0])}
    state = AdamState.create(params, learning_rate=0.1)
    for _ in range(500):
        params = adam_step(state, params, {"x": -2.0 * params["x"]})
    assert np.all(np.abs(params["x"]) < 0.2)


def test_frozen_keys_are_untouched():
    params = {"w": np.ones(2), "theta": np.zeros(1)}
    state = AdamState.create(params)
    grads = {"w": np.ones(2), "theta": np.ones(1)}
    for _ in range(3):
        params = adam_step(state, params, grads, frozen=["theta"])
    np.testing.assert_array_equal(params["theta"], [0.0])
    assert state.steps == {"w": 3, "theta": 0}
    np.testing.assert_array_equal(state.first["theta"], [0.0])
    params = adam_step(state, params, grads)
    # fresh bias correction on release
    np.testing.assert_allclose(params["theta"], [0.01], atol=1e-6)


def test_shape_errors():
    params = {"w": np.ones(2)}
    state = AdamState.create(params)
    with pytest.raises(ShapeError):
        adam_step(state, params, {})
    with pytest.raises(ShapeError):
        adam_step(state, params, {"w": np.ones(3)})


def test_state_dict_round_trip():
    params = {"w": np.arange(3.0)}
    state = AdamState.create(params, learning_rate=0.05)
    adam_step(state, params, {"w": np.ones(3)})
    restored = AdamState.from_dict(state.to_dict())
    assert restored.steps == state.steps
    assert restored.learning_rate == 0.05
    np.testing.assert_array_equal(restored.second["w"], state.second["w"])


def test_nonpositive_learning_rate():
    with pytest.raises(ValueError):
        AdamState.create({}, learning_rate=0.0)
