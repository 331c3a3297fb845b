"""MAE loss with its subgradient, plus plain SGD and RMSProp update rules.

Both step functions mutate the parameter dict in place and assume one
optimizer instance per model (never shared across trainers).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMIZERS = ("sgd", "rmsprop")

# Widely published defaults; used when a learning rate is not given explicitly.
SGD_LR = 0.01
RMSPROP_LR = 0.001
RMSPROP_RHO = 0.9
RMSPROP_EPS = 1e-8


@dataclass(frozen=True)
class OptimizerConfig:
    kind: str
    learning_rate: float
    rho: float = RMSPROP_RHO
    eps: float = RMSPROP_EPS

    def __post_init__(self):
        if self.kind not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.kind!r}, expected one of {OPTIMIZERS}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must be in (0, 1), got {self.rho}")
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")


def default_config(kind: str, learning_rate: float | None = None) -> OptimizerConfig:
    if kind not in OPTIMIZERS:
        raise ValueError(f"unknown optimizer {kind!r}, expected one of {OPTIMIZERS}")
    if learning_rate is None:
        learning_rate = SGD_LR if kind == "sgd" else RMSPROP_LR
    return OptimizerConfig(kind=kind, learning_rate=learning_rate)


def _check_pair(params: dict[str, np.ndarray], grads: dict[str, np.ndarray]):
    if params.keys() != grads.keys():
        raise ValueError(
            f"parameter/gradient key mismatch: {sorted(params)} vs {sorted(grads)}"
        )
    for name, p in params.items():
        if grads[name].shape != p.shape:
            raise ValueError(
                f"gradient shape mismatch for {name}: {grads[name].shape} vs {p.shape}"
            )


def mae_loss(yhat, y) -> float:
    """Mean absolute error sum(|yhat_i - y_i|)/n."""
    yhat = np.asarray(yhat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if yhat.shape != y.shape:
        raise ValueError(f"mae_loss length mismatch: {yhat.shape} vs {y.shape}")
    if yhat.size == 0:
        raise ValueError("mae_loss of empty vectors is undefined")
    return float(np.mean(np.abs(yhat - y)))


def mae_grad(yhat, y) -> np.ndarray:
    """Subgradient of mae_loss w.r.t. yhat: sign(yhat_i - y_i)/n, sign(0) = 0."""
    yhat = np.asarray(yhat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if yhat.shape != y.shape:
        raise ValueError(f"mae_grad length mismatch: {yhat.shape} vs {y.shape}")
    if yhat.size == 0:
        raise ValueError("mae_grad of empty vectors is undefined")
    return np.sign(yhat - y) / yhat.size


def sgd_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray], learning_rate: float):
    """theta <- theta - lr * g, elementwise, in place."""
    _check_pair(params, grads)
    for name, p in params.items():
        p -= learning_rate * grads[name]
    return params


@dataclass
class RmspropState:
    """Squared-gradient accumulators, one per parameter array, starting at zero."""

    acc: dict[str, np.ndarray]
    rho: float = RMSPROP_RHO
    eps: float = RMSPROP_EPS


def init_rmsprop(params: dict[str, np.ndarray], config: OptimizerConfig) -> RmspropState:
    return RmspropState(
        acc={name: np.zeros_like(p) for name, p in params.items()},
        rho=config.rho,
        eps=config.eps,
    )


def rmsprop_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: RmspropState,
    config: OptimizerConfig,
):
    """s <- rho*s + (1-rho)*g^2; theta <- theta - lr*g/(sqrt(s) + eps), in place.

    eps is added after the square root; implementations disagree on this and
    it changes trajectories, so it is pinned here and covered by tests.
    """
    _check_pair(params, grads)
    _check_pair(params, state.acc)
    rho, eps, lr = state.rho, state.eps, config.learning_rate
    for name, p in params.items():
        g = grads[name]
        s = state.acc[name]
        s *= rho
        s += (1.0 - rho) * g * g
        p -= lr * g / (np.sqrt(s) + eps)
    return params, state


class Optimizer:
    """Uniform stepper owning per-model state; dispatches on config.kind."""

    def __init__(self, params: dict[str, np.ndarray], config: OptimizerConfig):
        self.config = config
        self.state = init_rmsprop(params, config) if config.kind == "rmsprop" else None

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]):
        if self.state is None:
            sgd_step(params, grads, self.config.learning_rate)
        else:
            rmsprop_step(params, grads, self.state, self.config)
