import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fxbench.optim import (
    Optimizer,
    OptimizerConfig,
    RmspropState,
    default_config,
    init_rmsprop,
    mae_grad,
    mae_loss,
    rmsprop_step,
    sgd_step,
)

vec = st.lists(st.floats(min_value=-100, max_value=100, allow_nan=False), min_size=1, max_size=20)


# ---------------------------------------------------------------- config


def test_config_defaults():
    sgd = default_config("sgd")
    assert (sgd.kind, sgd.learning_rate) == ("sgd", 0.01)
    rp = default_config("rmsprop")
    assert (rp.kind, rp.learning_rate, rp.rho, rp.eps) == ("rmsprop", 0.001, 0.9, 1e-8)
    assert default_config("rmsprop", 0.005).learning_rate == 0.005


def test_config_validation():
    with pytest.raises(ValueError, match="unknown optimizer"):
        OptimizerConfig(kind="adam", learning_rate=0.1)
    with pytest.raises(ValueError, match="learning_rate"):
        OptimizerConfig(kind="sgd", learning_rate=0.0)
    with pytest.raises(ValueError, match="rho"):
        OptimizerConfig(kind="rmsprop", learning_rate=0.1, rho=1.0)


# ---------------------------------------------------------------- mae


def test_mae_identical_vectors():
    assert mae_loss([0.5, 0.5], [0.5, 0.5]) == 0.0


def test_mae_hand_example():
    assert mae_loss([1.0, 2.0, 3.0], [2.0, 2.0, 5.0]) == pytest.approx(1.0, abs=1e-15)


def test_mae_rejects_mismatch_and_empty():
    with pytest.raises(ValueError, match="length"):
        mae_loss([1.0], [1.0, 2.0])
    with pytest.raises(ValueError, match="empty"):
        mae_loss([], [])
    with pytest.raises(ValueError, match="length"):
        mae_grad([1.0], [1.0, 2.0])


@given(vec)
def test_mae_symmetric_and_nonnegative(values):
    a = np.array(values)
    b = a[::-1].copy()
    assert mae_loss(a, b) == mae_loss(b, a) >= 0.0


@given(vec)
def test_mae_zero_iff_equal(values):
    a = np.array(values)
    assert mae_loss(a, a.copy()) == 0.0
    assert mae_loss(a, a + 1.0) > 0.0


def test_mae_grad_at_kink_is_zero():
    assert np.array_equal(mae_grad([1.0, 2.0], [1.0, 2.0]), [0.0, 0.0])


def test_mae_grad_hand_example():
    assert np.array_equal(mae_grad([2.0], [1.0]), [1.0])
    assert np.array_equal(mae_grad([1.0, 5.0], [3.0, 1.0]), [-0.5, 0.5])


def test_mae_grad_matches_finite_difference_away_from_kinks():
    rng = np.random.default_rng(7)
    yhat = rng.uniform(-5, 5, size=50)
    y = yhat + rng.choice([-1.0, 1.0], size=50) * rng.uniform(0.01, 2.0, size=50)
    g = mae_grad(yhat, y)
    h = 1e-6
    for i in range(50):
        bumped = yhat.copy()
        bumped[i] += h
        fplus = mae_loss(bumped, y)
        bumped[i] -= 2 * h
        fminus = mae_loss(bumped, y)
        assert abs((fplus - fminus) / (2 * h) - g[i]) <= 1e-8


# ---------------------------------------------------------------- sgd


def test_sgd_zero_gradient_is_identity():
    params = {"w": np.array([1.0])}
    sgd_step(params, {"w": np.array([0.0])}, 0.1)
    assert params["w"][0] == 1.0


def test_sgd_hand_steps():
    params = {"w": np.array([1.0])}
    g = {"w": np.array([0.5])}
    sgd_step(params, g, 0.1)
    assert params["w"][0] == pytest.approx(0.95, abs=1e-15)
    sgd_step(params, g, 0.1)
    assert params["w"][0] == pytest.approx(0.90, abs=1e-15)


def test_sgd_shape_mismatch():
    with pytest.raises(ValueError):
        sgd_step({"w": np.zeros(2)}, {"w": np.zeros(3)}, 0.1)
    with pytest.raises(ValueError):
        sgd_step({"w": np.zeros(2)}, {"v": np.zeros(2)}, 0.1)


# ---------------------------------------------------------------- rmsprop


def test_rmsprop_zero_gradient_decays_accumulator_only():
    cfg = default_config("rmsprop")
    params = {"w": np.array([2.0])}
    state = init_rmsprop(params, cfg)
    state.acc["w"][:] = 1.0
    rmsprop_step(params, {"w": np.array([0.0])}, state, cfg)
    assert params["w"][0] == 2.0
    assert state.acc["w"][0] == pytest.approx(0.9, abs=1e-15)


def test_rmsprop_first_step_hand_value():
    cfg = default_config("rmsprop")
    params = {"w": np.array([0.0])}
    state = init_rmsprop(params, cfg)
    rmsprop_step(params, {"w": np.array([1.0])}, state, cfg)
    assert state.acc["w"][0] == pytest.approx(0.1, abs=1e-15)
    # -lr / (sqrt(0.1) + eps)
    assert params["w"][0] == pytest.approx(-0.001 / (np.sqrt(0.1) + 1e-8), abs=1e-15)
    assert params["w"][0] == pytest.approx(-0.0031623, abs=1e-7)


def test_rmsprop_steady_state_step_magnitude_bounded_by_lr():
    cfg = default_config("rmsprop")
    params = {"w": np.array([0.0])}
    state = init_rmsprop(params, cfg)
    g = {"w": np.array([3.7])}
    prev = params["w"][0]
    for _ in range(250):
        prev = params["w"][0]
        rmsprop_step(params, g, state, cfg)
    assert abs(params["w"][0] - prev) <= cfg.learning_rate * (1 + 1e-9)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=-50, max_value=50, allow_nan=False), min_size=1, max_size=30))
def test_rmsprop_accumulators_stay_nonnegative(gradients):
    cfg = default_config("rmsprop")
    params = {"w": np.array([1.0])}
    state = init_rmsprop(params, cfg)
    for g in gradients:
        rmsprop_step(params, {"w": np.array([g])}, state, cfg)
        assert state.acc["w"][0] >= 0.0


def test_rmsprop_state_requires_matching_shapes():
    cfg = default_config("rmsprop")
    params = {"w": np.zeros(2)}
    state = init_rmsprop(params, cfg)
    with pytest.raises(ValueError):
        rmsprop_step(params, {"w": np.zeros(3)}, state, cfg)


# ---------------------------------------------------------------- dispatcher


def test_optimizer_class_dispatches_both_kinds():
    for kind in ("sgd", "rmsprop"):
        params = {"w": np.array([1.0])}
        opt = Optimizer(params, default_config(kind))
        before = params["w"][0]
        opt.step(params, {"w": np.array([0.5])})
        assert params["w"][0] < before


def test_optimizer_rmsprop_keeps_state_across_steps():
    params = {"w": np.array([0.0])}
    opt = Optimizer(params, default_config("rmsprop"))
    opt.step(params, {"w": np.array([1.0])})
    first = params["w"][0]
    opt.step(params, {"w": np.array([1.0])})
    # second step divides by a larger accumulator, so it moves less than 2x
    assert abs(params["w"][0]) < 2 * abs(first)
    assert isinstance(opt.state, RmspropState)
