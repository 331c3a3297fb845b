"""The four forecasting architectures: MLP, SRNN, LSTM and GRU.

Every model is one hidden block of `hidden` units plus a linear output
layer. Recurrent cells consume a window of input vectors and predict from
the final hidden state; hidden (and cell) state starts at zero for each
sample, so samples are independent. Parameters live in a flat
name -> float64 array dict, which lets optimizers and serialization treat
all architectures uniformly.

Cell equations, with x_t the input at step t and [a; b] concatenation:

  MLP   h = sig(W_h x + b_h)                          (window must be 1)
  SRNN  h_t = tanh(W_x x_t + W_h h_{t-1} + b)
  LSTM  i,f,o = sig(W_g [x_t; h_{t-1}] + b_g)   g in {i,f,o}
        cand  = tanh(W_c [x_t; h_{t-1}] + b_c)
        c_t   = f * c_{t-1} + i * cand
        h_t   = o * tanh(c_t)
  GRU   z,r   = sig(W_g [x_t; h_{t-1}] + b_g)   g in {z,r}
        cand  = tanh(W_h [x_t; r * h_{t-1}] + b_h)
        h_t   = (1 - z) * h_{t-1} + z * cand

  output (all) yhat = W_out h_T + b_out          (linear, unbounded)

`backward` is exact analytic backpropagation through the whole window
(untruncated BPTT); every gradient is checked against central finite
differences in the test suite.

Internally everything runs batched: inputs are (batch, window, input_dim)
arrays and the same code path serves single samples as a batch of one, so
training, evaluation and the single-sample API cannot drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import sigmoid

# Canonical order: report sorting, selection tie-breaks and per-trial seed
# derivation all index architectures by position in this tuple.
ARCHS = ("mlp", "srnn", "gru", "lstm")


def arch_id(arch: str) -> int:
    if arch not in ARCHS:
        raise ValueError(f"unknown architecture {arch!r}, expected one of {ARCHS}")
    return ARCHS.index(arch)


@dataclass(frozen=True)
class ModelSpec:
    """Architecture plus layer sizes; `window` is the sequence length per sample."""

    arch: str
    hidden: int
    input_dim: int = 4
    output_dim: int = 1
    window: int = 1

    def __post_init__(self):
        arch_id(self.arch)
        for name in ("hidden", "input_dim", "output_dim", "window"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.arch == "mlp" and self.window != 1:
            raise ValueError(f"mlp supports window=1 only, got window={self.window}")

    @property
    def structure(self) -> str:
        """Neuron counts as 'input-hidden-output', e.g. '4-5-1'."""
        return f"{self.input_dim}-{self.hidden}-{self.output_dim}"


def param_shapes(spec: ModelSpec) -> dict[str, tuple[int, ...]]:
    """Name -> shape of every parameter array, in canonical order.

    The order is load-bearing: weight initialization draws matrices in this
    order, so it is part of the determinism contract.
    """
    d, h, out = spec.input_dim, spec.hidden, spec.output_dim
    shapes: dict[str, tuple[int, ...]] = {}
    if spec.arch == "mlp":
        shapes["W_h"] = (h, d)
        shapes["b_h"] = (h,)
    elif spec.arch == "srnn":
        shapes["W_x"] = (h, d)
        shapes["W_h"] = (h, h)
        shapes["b"] = (h,)
    elif spec.arch == "lstm":
        for g in ("i", "f", "o", "c"):
            shapes[f"W_{g}"] = (h, d + h)
            shapes[f"b_{g}"] = (h,)
    elif spec.arch == "gru":
        for g in ("z", "r", "h"):
            shapes[f"W_{g}"] = (h, d + h)
            shapes[f"b_{g}"] = (h,)
    shapes["W_out"] = (out, h)
    shapes["b_out"] = (out,)
    return shapes


def activation_names(spec: ModelSpec) -> dict[str, str]:
    """Named activation functions per role, as recorded in saved model files."""
    if spec.arch == "mlp":
        return {"hidden": "sigmoid", "output": "linear"}
    if spec.arch == "srnn":
        return {"hidden": "tanh", "output": "linear"}
    return {"gate": "sigmoid", "hidden": "tanh", "output": "linear"}


@dataclass
class NetworkModel:
    spec: ModelSpec
    params: dict[str, np.ndarray]
    rng_seed: int
    epochs_trained: int = 0


def init_model(spec: ModelSpec, seed: int) -> NetworkModel:
    """Glorot-uniform weights (U[-r, r], r = sqrt(6/(fan_in+fan_out))), zero biases.

    Deterministic for a fixed (spec, seed): matrices are drawn in
    `param_shapes` order from a PCG64 generator seeded with `seed`.
    """
    rng = np.random.default_rng(seed)
    params: dict[str, np.ndarray] = {}
    for name, shape in param_shapes(spec).items():
        if len(shape) == 2:
            fan_out, fan_in = shape
            r = np.sqrt(6.0 / (fan_in + fan_out))
            params[name] = rng.uniform(-r, r, size=shape)
        else:
            params[name] = np.zeros(shape)
    return NetworkModel(spec=spec, params=params, rng_seed=int(seed))


def parameter_count(model: NetworkModel) -> int:
    return sum(a.size for a in model.params.values())


@dataclass
class ForwardCache:
    """Everything backward needs: inputs, initial state and per-step tensors.

    Stacked arrays are time-major: hs is (T+1, B, h) with hs[0] the initial
    state, gate tensors are (T, B, h), concat buffers (T, B, d+h).
    """

    model: NetworkModel
    x: np.ndarray  # (B, T, d)
    h0: np.ndarray  # (B, h)
    c0: np.ndarray | None
    steps: dict[str, np.ndarray] = field(default_factory=dict)
    hidden_final: np.ndarray | None = None
    yhat: np.ndarray | None = None


def _as_batch(x, spec: ModelSpec) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"batched input must be (batch, window, input_dim), got shape {x.shape}")
    _, t, d = x.shape
    if t != spec.window:
        raise ValueError(f"window length mismatch: model expects {spec.window}, got {t}")
    if d != spec.input_dim:
        raise ValueError(f"input_dim mismatch: model expects {spec.input_dim}, got {d}")
    return x


def _state(value, batch: int, hidden: int, name: str) -> np.ndarray:
    if value is None:
        return np.zeros((batch, hidden))
    s = np.asarray(value, dtype=np.float64)
    if s.ndim == 1:
        s = np.broadcast_to(s, (batch, hidden)).copy()
    if s.shape != (batch, hidden):
        raise ValueError(f"{name} must have shape ({batch}, {hidden}), got {s.shape}")
    return s


def forward_batch(model: NetworkModel, x, h0=None, c0=None) -> tuple[np.ndarray, ForwardCache]:
    """Run a batch of windows through the cell; returns (yhat (B, out), cache).

    h0/c0 are test hooks for seeding the initial hidden/cell state; they
    default to zeros, which is what the training pipeline always uses.
    """
    spec = model.spec
    p = model.params
    x = _as_batch(x, spec)
    b, t, d = x.shape
    h = spec.hidden
    if c0 is not None and spec.arch != "lstm":
        raise ValueError(f"c0 only applies to lstm models, not {spec.arch}")

    cache = ForwardCache(model=model, x=x, h0=_state(h0, b, h, "h0"), c0=None)
    st = cache.steps

    if spec.arch == "mlp":
        hidden = sigmoid(x[:, 0] @ p["W_h"].T + p["b_h"])
        st["hidden"] = hidden
        final = hidden
    elif spec.arch == "srnn":
        hs = np.empty((t + 1, b, h))
        hs[0] = cache.h0
        for k in range(t):
            hs[k + 1] = np.tanh(x[:, k] @ p["W_x"].T + hs[k] @ p["W_h"].T + p["b"])
        st["hs"] = hs
        final = hs[t]
    elif spec.arch == "lstm":
        cache.c0 = _state(c0, b, h, "c0")
        hs = np.empty((t + 1, b, h))
        cs = np.empty((t + 1, b, h))
        hs[0] = cache.h0
        cs[0] = cache.c0
        gi = np.empty((t, b, h))
        gf = np.empty((t, b, h))
        go = np.empty((t, b, h))
        cand = np.empty((t, b, h))
        tanh_c = np.empty((t, b, h))
        xc = np.empty((t, b, d + h))
        for k in range(t):
            xc[k, :, :d] = x[:, k]
            xc[k, :, d:] = hs[k]
            gi[k] = sigmoid(xc[k] @ p["W_i"].T + p["b_i"])
            gf[k] = sigmoid(xc[k] @ p["W_f"].T + p["b_f"])
            go[k] = sigmoid(xc[k] @ p["W_o"].T + p["b_o"])
            cand[k] = np.tanh(xc[k] @ p["W_c"].T + p["b_c"])
            cs[k + 1] = gf[k] * cs[k] + gi[k] * cand[k]
            tanh_c[k] = np.tanh(cs[k + 1])
            hs[k + 1] = go[k] * tanh_c[k]
        st.update(hs=hs, cs=cs, i=gi, f=gf, o=go, cand=cand, tanh_c=tanh_c, xc=xc)
        final = hs[t]
    else:  # gru
        hs = np.empty((t + 1, b, h))
        hs[0] = cache.h0
        gz = np.empty((t, b, h))
        gr = np.empty((t, b, h))
        cand = np.empty((t, b, h))
        xc = np.empty((t, b, d + h))  # [x_t; h_{t-1}] for the z/r gates
        xrc = np.empty((t, b, d + h))  # [x_t; r * h_{t-1}] for the candidate
        for k in range(t):
            xc[k, :, :d] = x[:, k]
            xc[k, :, d:] = hs[k]
            gz[k] = sigmoid(xc[k] @ p["W_z"].T + p["b_z"])
            gr[k] = sigmoid(xc[k] @ p["W_r"].T + p["b_r"])
            xrc[k, :, :d] = x[:, k]
            xrc[k, :, d:] = gr[k] * hs[k]
            cand[k] = np.tanh(xrc[k] @ p["W_h"].T + p["b_h"])
            hs[k + 1] = (1.0 - gz[k]) * hs[k] + gz[k] * cand[k]
        st.update(hs=hs, z=gz, r=gr, cand=cand, xc=xc, xrc=xrc)
        final = hs[t]

    yhat = final @ p["W_out"].T + p["b_out"]
    cache.hidden_final = final
    cache.yhat = yhat
    return yhat, cache


def forward(model: NetworkModel, x_window, h0=None, c0=None) -> tuple[np.ndarray, ForwardCache]:
    """Single-sample forward: x_window is (window, input_dim) or a list of vectors."""
    x = np.asarray(x_window, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2:
        raise ValueError(f"x_window must be (window, input_dim), got shape {x.shape}")
    yhat, cache = forward_batch(model, x[None], h0=h0, c0=c0)
    return yhat[0], cache


def backward(model: NetworkModel, cache: ForwardCache, dl_dyhat) -> dict[str, np.ndarray]:
    """Exact gradients of L w.r.t. every parameter, given dL/dyhat.

    Accepts a (out,) cotangent for a batch-of-one cache or (B, out) for a
    batched one; batch contributions are summed, so the caller folds any
    1/B averaging into the cotangent.
    """
    if cache.model is not model:
        raise ValueError("cache was produced by a different model")
    spec = model.spec
    p = model.params
    x = cache.x
    b, t, d = x.shape
    h = spec.hidden

    dy = np.asarray(dl_dyhat, dtype=np.float64)
    if dy.ndim == 1:
        if b != 1:
            raise ValueError(f"1-d cotangent given for a cache with batch size {b}")
        dy = dy[None, :]
    if dy.shape != (b, spec.output_dim):
        raise ValueError(f"cotangent shape {dy.shape} does not match ({b}, {spec.output_dim})")

    grads = {name: np.zeros_like(arr) for name, arr in model.params.items()}
    st = cache.steps

    grads["W_out"] += dy.T @ cache.hidden_final
    grads["b_out"] += dy.sum(axis=0)
    dh = dy @ p["W_out"]  # (B, h)

    if spec.arch == "mlp":
        hidden = st["hidden"]
        dpre = dh * hidden * (1.0 - hidden)
        grads["W_h"] += dpre.T @ x[:, 0]
        grads["b_h"] += dpre.sum(axis=0)
    elif spec.arch == "srnn":
        hs = st["hs"]
        for k in range(t - 1, -1, -1):
            dpre = dh * (1.0 - hs[k + 1] ** 2)
            grads["W_x"] += dpre.T @ x[:, k]
            grads["W_h"] += dpre.T @ hs[k]
            grads["b"] += dpre.sum(axis=0)
            dh = dpre @ p["W_h"]
    elif spec.arch == "lstm":
        hs, cs = st["hs"], st["cs"]
        gi, gf, go, cand, tanh_c, xc = st["i"], st["f"], st["o"], st["cand"], st["tanh_c"], st["xc"]
        dc = np.zeros((b, h))
        for k in range(t - 1, -1, -1):
            do = dh * tanh_c[k]
            dc = dc + dh * go[k] * (1.0 - tanh_c[k] ** 2)
            di = dc * cand[k]
            dcand = dc * gi[k]
            df = dc * cs[k]
            dc = dc * gf[k]  # carried to c_{k-1}
            dzi = di * gi[k] * (1.0 - gi[k])
            dzf = df * gf[k] * (1.0 - gf[k])
            dzo = do * go[k] * (1.0 - go[k])
            dzc = dcand * (1.0 - cand[k] ** 2)
            grads["W_i"] += dzi.T @ xc[k]
            grads["W_f"] += dzf.T @ xc[k]
            grads["W_o"] += dzo.T @ xc[k]
            grads["W_c"] += dzc.T @ xc[k]
            grads["b_i"] += dzi.sum(axis=0)
            grads["b_f"] += dzf.sum(axis=0)
            grads["b_o"] += dzo.sum(axis=0)
            grads["b_c"] += dzc.sum(axis=0)
            dxc = dzi @ p["W_i"] + dzf @ p["W_f"] + dzo @ p["W_o"] + dzc @ p["W_c"]
            dh = dxc[:, d:]
    else:  # gru
        hs = st["hs"]
        gz, gr, cand, xc, xrc = st["z"], st["r"], st["cand"], st["xc"], st["xrc"]
        for k in range(t - 1, -1, -1):
            h_prev = hs[k]
            dcand = dh * gz[k]
            dz = dh * (cand[k] - h_prev)
            dh_prev = dh * (1.0 - gz[k])
            dzc = dcand * (1.0 - cand[k] ** 2)
            grads["W_h"] += dzc.T @ xrc[k]
            grads["b_h"] += dzc.sum(axis=0)
            dxrc = dzc @ p["W_h"]
            drh = dxrc[:, d:]  # gradient w.r.t. r * h_prev
            dr = drh * h_prev
            dh_prev = dh_prev + drh * gr[k]
            dzz = dz * gz[k] * (1.0 - gz[k])
            dzr = dr * gr[k] * (1.0 - gr[k])
            grads["W_z"] += dzz.T @ xc[k]
            grads["W_r"] += dzr.T @ xc[k]
            grads["b_z"] += dzz.sum(axis=0)
            grads["b_r"] += dzr.sum(axis=0)
            dh = dh_prev + (dzz @ p["W_z"])[:, d:] + (dzr @ p["W_r"])[:, d:]

    return grads
