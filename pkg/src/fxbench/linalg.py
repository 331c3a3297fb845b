"""Dense float64 kernels the network cells are built on.

Vectors are 1-d numpy arrays, matrices 2-d row-major. Shapes are checked
loudly; values are never silently cast to lower precision.
"""

from __future__ import annotations

import numpy as np

ACTIVATIONS = ("sigmoid", "tanh")


def as_vector(x, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-d, got shape {v.shape}")
    return v


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {m.shape}")
    return m


def matvec(w, x) -> np.ndarray:
    """Matrix-vector product with an explicit shape error naming both operands."""
    w = as_matrix(w, "matvec matrix")
    x = as_vector(x, "matvec vector")
    if w.shape[1] != x.shape[0]:
        raise ValueError(
            f"matvec shape mismatch: matrix {w.shape} cannot multiply vector ({x.shape[0]},)"
        )
    return w @ x


def sigmoid(z):
    """Elementwise logistic 1/(1+e^-z); saturates to exactly 0/1 for huge |z|."""
    z = np.asarray(z, dtype=np.float64)
    # exp overflow for z << 0 still yields the correct limit (0.0); silence the warning
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-z))


def dsigmoid_from_output(y):
    """Sigmoid derivative expressed through the sigmoid output y."""
    y = np.asarray(y, dtype=np.float64)
    return y * (1.0 - y)


def dtanh_from_output(y):
    """tanh derivative expressed through the tanh output y."""
    y = np.asarray(y, dtype=np.float64)
    return 1.0 - y * y


def activation(kind: str, v) -> np.ndarray:
    """Apply sigmoid or tanh elementwise to a vector."""
    v = as_vector(v, "activation input")
    if kind == "sigmoid":
        return sigmoid(v)
    if kind == "tanh":
        return np.tanh(v)
    raise ValueError(f"unknown activation {kind!r}, expected one of {ACTIVATIONS}")


def activation_deriv(kind: str, y) -> np.ndarray:
    """Derivative of `activation(kind, .)` given its output vector y."""
    y = as_vector(y, "activation output")
    if kind == "sigmoid":
        return dsigmoid_from_output(y)
    if kind == "tanh":
        return dtanh_from_output(y)
    raise ValueError(f"unknown activation {kind!r}, expected one of {ACTIVATIONS}")
