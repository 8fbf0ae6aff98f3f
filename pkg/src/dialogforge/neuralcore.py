"""Minimal deterministic neural substrate built on numpy.

Dense and LSTM primitives with hand-derived backward passes, inverted
dropout, a softmax cross-entropy loss, bias-corrected Adam, and a
central-difference gradient checker. Everything is float64 and driven by
explicitly seeded generators, so identical seeds give bit-identical
results on one machine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Array = np.ndarray
Rng = np.random.Generator

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def make_rng(seed: int) -> Rng:
    return np.random.default_rng(seed)


def glorot_uniform(rng: Rng, shape: tuple[int, ...]) -> Array:
    """Uniform init in +-sqrt(6 / (fan_in + fan_out))."""
    fan_out, fan_in = shape[0], shape[-1]
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


# ---------------------------------------------------------------------------
# dense layer


def affine_apply(W: Array, b: Array, x: Array) -> Array:
    """``y = W x + b`` for a vector, or row-wise for a batch matrix."""
    W = np.asarray(W, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if W.ndim != 2 or x.shape[-1] != W.shape[1]:
        raise ValueError(f"shape mismatch: W {W.shape} vs x {x.shape}")
    return x @ W.T + b


def affine_backward(grad_y: Array, x: Array, W: Array) -> tuple[Array, Array, Array]:
    """Gradients (dx, dW, db) given the upstream gradient on y."""
    if grad_y.ndim == 1:
        grad_y = grad_y[None, :]
        x = x[None, :]
    dW = grad_y.T @ x
    db = grad_y.sum(axis=0)
    dx = grad_y @ W
    return np.squeeze(dx) if dx.shape[0] == 1 else dx, dW, db


# ---------------------------------------------------------------------------
# LSTM cell (gate rows ordered input, forget, candidate, output)


@dataclass
class LstmParams:
    w_x: Array  # (4H, input_dim)
    w_h: Array  # (4H, H)
    b: Array  # (4H,)

    @property
    def hidden_size(self) -> int:
        return self.w_h.shape[1]

    @classmethod
    def init(cls, input_dim: int, hidden: int, rng: Rng) -> "LstmParams":
        w_x = glorot_uniform(rng, (4 * hidden, input_dim))
        w_h = glorot_uniform(rng, (4 * hidden, hidden))
        b = np.zeros(4 * hidden)
        b[hidden : 2 * hidden] = 1.0  # forget gate bias
        return cls(w_x, w_h, b)


def _sigmoid(z: Array) -> Array:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_step(
    params: LstmParams, x_t: Array, h_prev: Array, c_prev: Array
) -> tuple[Array, Array]:
    """One LSTM step on plain vectors: returns (h_t, c_t)."""
    h_t, c_t, _ = lstm_step_forward(params, x_t[None, :], h_prev[None, :], c_prev[None, :])
    return h_t[0], c_t[0]


def lstm_step_forward(
    params: LstmParams, x_t: Array, h_prev: Array, c_prev: Array
) -> tuple[Array, Array, dict]:
    """One LSTM step on (batch, dim) matrices.

    Returns (h_t, c_t, cache) where the cache feeds
    :func:`lstm_step_backward`.
    """
    H = params.hidden_size
    x_t = np.asarray(x_t, dtype=np.float64)
    if x_t.shape[-1] != params.w_x.shape[1]:
        raise ValueError(f"input dim {x_t.shape[-1]} != {params.w_x.shape[1]}")
    z = x_t @ params.w_x.T + h_prev @ params.w_h.T + params.b
    i = _sigmoid(z[:, :H])
    f = _sigmoid(z[:, H : 2 * H])
    g = np.tanh(z[:, 2 * H : 3 * H])
    o = _sigmoid(z[:, 3 * H :])
    c_t = f * c_prev + i * g
    tc = np.tanh(c_t)
    h_t = o * tc
    cache = {"x": x_t, "h_prev": h_prev, "c_prev": c_prev, "i": i, "f": f, "g": g, "o": o, "tc": tc}
    return h_t, c_t, cache


def lstm_step_backward(
    params: LstmParams, cache: dict, dh: Array, dc: Array
) -> tuple[Array, Array, Array, Array, Array, Array]:
    """Backprop through one step: (dx, dh_prev, dc_prev, dw_x, dw_h, db)."""
    i, f, g, o, tc = cache["i"], cache["f"], cache["g"], cache["o"], cache["tc"]
    dh = np.atleast_2d(dh)
    dc = np.atleast_2d(dc)
    dc_total = dc + dh * o * (1.0 - tc**2)
    dz_o = dh * tc * o * (1.0 - o)
    dz_f = dc_total * cache["c_prev"] * f * (1.0 - f)
    dz_i = dc_total * g * i * (1.0 - i)
    dz_g = dc_total * i * (1.0 - g**2)
    dz = np.concatenate([dz_i, dz_f, dz_g, dz_o], axis=1)
    dx = dz @ params.w_x
    dh_prev = dz @ params.w_h
    dc_prev = dc_total * f
    dw_x = dz.T @ cache["x"]
    dw_h = dz.T @ cache["h_prev"]
    db = dz.sum(axis=0)
    return dx, dh_prev, dc_prev, dw_x, dw_h, db


# ---------------------------------------------------------------------------
# dropout


def dropout_apply(x: Array, rate: float, rng: Rng | None, training: bool) -> Array:
    x2, _ = dropout_forward(x, rate, rng, training)
    return x2


def dropout_forward(
    x: Array, rate: float, rng: Rng | None, training: bool
) -> tuple[Array, Array | None]:
    """Inverted dropout; returns (output, mask). Identity at inference."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return np.asarray(x, dtype=np.float64), None
    if rng is None:
        raise ValueError("training-mode dropout needs an rng")
    mask = (rng.random(np.shape(x)) >= rate) / (1.0 - rate)
    return np.asarray(x) * mask, mask


# ---------------------------------------------------------------------------
# softmax cross-entropy


def log_softmax(logits: Array) -> Array:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax(logits: Array) -> Array:
    return np.exp(log_softmax(logits))


def softmax_xent(logits: Array, label: int) -> tuple[float, Array]:
    """Negative log-likelihood of ``label`` plus its gradient on the logits."""
    logits = np.asarray(logits, dtype=np.float64)
    if not 0 <= label < logits.shape[-1]:
        raise ValueError(f"label {label} out of range for {logits.shape[-1]} logits")
    logp = log_softmax(logits)
    loss = -logp[label]
    grad = np.exp(logp)
    grad[label] -= 1.0
    return float(loss), grad


def softmax_xent_batch(logits: Array, labels: Array) -> tuple[float, Array]:
    """Mean cross-entropy over a batch; gradient already divided by batch size."""
    logp = log_softmax(logits)
    n = logits.shape[0]
    loss = -logp[np.arange(n), labels].mean()
    grad = np.exp(logp)
    grad[np.arange(n), labels] -= 1.0
    return float(loss), grad / n


# ---------------------------------------------------------------------------
# Adam


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS
    t: int = 0
    m: dict[str, Array] = field(default_factory=dict)
    v: dict[str, Array] = field(default_factory=dict)


def adam_update(
    params: dict[str, Array], grads: dict[str, Array], state: AdamState
) -> dict[str, Array]:
    """One bias-corrected Adam step over a named parameter set."""
    state.t += 1
    t = state.t
    out: dict[str, Array] = {}
    for name, theta in params.items():
        g = grads[name]
        if g.shape != theta.shape:
            raise ValueError(f"gradient shape {g.shape} != param shape {theta.shape} for {name!r}")
        m = state.m.setdefault(name, np.zeros_like(theta))
        v = state.v.setdefault(name, np.zeros_like(theta))
        m[...] = state.beta1 * m + (1 - state.beta1) * g
        v[...] = state.beta2 * v + (1 - state.beta2) * g**2
        m_hat = m / (1 - state.beta1**t)
        v_hat = v / (1 - state.beta2**t)
        out[name] = theta - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return out


# ---------------------------------------------------------------------------
# gradient checking


def grad_check(
    f: Callable[[dict[str, Array]], tuple[float, dict[str, Array]]],
    params: dict[str, Array],
    eps: float = 1e-5,
) -> float:
    """Max elementwise error between analytic and central-difference gradients.

    Error per element is ``|analytic - numeric| / max(1, |analytic|, |numeric|)``
    (relative above magnitude 1, absolute below).
    """
    if not 0.0 < eps <= 1e-2:
        raise ValueError(f"eps must be in (0, 1e-2], got {eps}")
    loss0, grads = f(params)
    if not np.isfinite(loss0):
        raise ValueError("loss is not finite at the evaluation point")
    worst = 0.0
    for name, theta in params.items():
        flat = theta.reshape(-1)
        analytic = grads[name].reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + eps
            lp, _ = f(params)
            flat[idx] = orig - eps
            lm, _ = f(params)
            flat[idx] = orig
            if not (np.isfinite(lp) and np.isfinite(lm)):
                raise ValueError("loss is not finite near the evaluation point")
            numeric = (lp - lm) / (2 * eps)
            denom = max(1.0, abs(analytic[idx]), abs(numeric))
            worst = max(worst, abs(analytic[idx] - numeric) / denom)
    return worst
