"""Single-layer LSTM classifier trained with full backpropagation through time.

Gate layout is stacked [input, forget, output, candidate] along the first axis
of the weight matrices, so W has shape (4H, F), U has shape (4H, H) and b has
shape (4H,). The readout is a sigmoid on the final hidden state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import ModelError, log_loss, sigmoid


@dataclass(frozen=True)
class LstmConfig:
    hidden: int = 16
    lr: float = 0.05
    epochs: int = 300
    batch_size: int = 32
    clip_norm: float = 5.0
    init_scale: float = 0.1
    early_stopping: bool = False
    patience: int = 20
    val_fraction: float = 0.2


def init_params(n_features: int, hidden: int, seed: int, init_scale: float = 0.1) -> dict:
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    h4 = 4 * hidden

    def uniform(*shape):
        return rng.uniform(-init_scale, init_scale, size=shape)

    params = {
        "W": uniform(h4, n_features),
        "U": uniform(h4, hidden),
        "b": uniform(h4),
        "v": uniform(hidden),
        "c": float(uniform(1)[0]),
    }
    params["b"][hidden: 2 * hidden] = 1.0  # forget-gate bias
    return params


def _forward(params: dict, x: np.ndarray):
    """Run the recurrence over x of shape (B, T, F); returns logits and caches."""
    b_size, t_len, _ = x.shape
    hidden = params["v"].shape[0]
    h = np.zeros((b_size, hidden))
    c = np.zeros((b_size, hidden))
    caches = []
    for t in range(t_len):
        z = x[:, t, :] @ params["W"].T + h @ params["U"].T + params["b"]
        i = sigmoid(z[:, :hidden])
        f = sigmoid(z[:, hidden: 2 * hidden])
        o = sigmoid(z[:, 2 * hidden: 3 * hidden])
        g = np.tanh(z[:, 3 * hidden:])
        c_next = f * c + i * g
        h_next = o * np.tanh(c_next)
        caches.append((h, c, i, f, o, g, c_next))
        h, c = h_next, c_next
    logits = h @ params["v"] + params["c"]
    return logits, h, caches


def loss_value(params: dict, x: np.ndarray, y: np.ndarray) -> float:
    logits, _, _ = _forward(params, x)
    return log_loss(logits, y)


def loss_and_grads(params: dict, x: np.ndarray, y: np.ndarray):
    """Mean BCE loss and its analytic gradients via BPTT."""
    b_size, t_len, _ = x.shape
    hidden = params["v"].shape[0]
    logits, h_final, caches = _forward(params, x)
    loss = log_loss(logits, y)

    dlogit = (sigmoid(logits) - y) / b_size  # (B,)
    grads = {
        "W": np.zeros_like(params["W"]),
        "U": np.zeros_like(params["U"]),
        "b": np.zeros_like(params["b"]),
        "v": h_final.T @ dlogit,
        "c": float(dlogit.sum()),
    }
    dh = np.outer(dlogit, params["v"])  # (B, H)
    dc = np.zeros((b_size, hidden))
    for t in range(t_len - 1, -1, -1):
        h_prev, c_prev, i, f, o, g, c_next = caches[t]
        tanh_c = np.tanh(c_next)
        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c**2)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        da = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                do * o * (1.0 - o),
                dg * (1.0 - g**2),
            ],
            axis=1,
        )  # (B, 4H)
        grads["W"] += da.T @ x[:, t, :]
        grads["U"] += da.T @ h_prev
        grads["b"] += da.sum(axis=0)
        dh = da @ params["U"]
        dc = dc * f
    return loss, grads


def _clip_global_norm(grads: dict, max_norm: float) -> dict:
    total = math.sqrt(
        sum(float(np.sum(np.square(g))) for g in grads.values() if isinstance(g, np.ndarray))
        + grads["c"] ** 2
    )
    if total <= max_norm or total == 0.0:
        return grads
    scale = max_norm / total
    return {
        key: (value * scale if isinstance(value, np.ndarray) else value * scale)
        for key, value in grads.items()
    }


def _copy_params(params: dict) -> dict:
    return {k: (v.copy() if isinstance(v, np.ndarray) else v) for k, v in params.items()}


def train_lstm(
    x_seq: np.ndarray, y: np.ndarray, cfg: LstmConfig = LstmConfig(), seed: int = 0
):
    """Gradient descent over seed-shuffled mini-batches, gradients clipped by
    global norm, backpropagating through every time step.

    With early stopping enabled, a seed-derived validation split is held out
    and training stops after `patience` epochs without validation improvement,
    restoring the best parameters.
    """
    params = init_params(x_seq.shape[2], cfg.hidden, seed, cfg.init_scale)
    train_x, train_y = x_seq, y
    val_x = val_y = None
    if cfg.early_stopping:
        rng_val = np.random.default_rng(np.random.SeedSequence([seed, 99]))
        n_val = max(1, int(round(cfg.val_fraction * len(y))))
        order = rng_val.permutation(len(y))
        val_idx, train_idx = order[:n_val], order[n_val:]
        if len(train_idx) == 0:
            raise ModelError("validation split left no training data")
        train_x, train_y = x_seq[train_idx], y[train_idx]
        val_x, val_y = x_seq[val_idx], y[val_idx]

    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    n = len(train_y)
    history = []
    best_val = math.inf
    best_params = None
    stale = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, cfg.batch_size):
            batch = order[start: start + cfg.batch_size]
            loss, grads = loss_and_grads(params, train_x[batch], train_y[batch])
            if not math.isfinite(loss):
                raise ModelError(f"non-finite LSTM loss at epoch {epoch}")
            epoch_losses.append(loss)
            grads = _clip_global_norm(grads, cfg.clip_norm)
            for key in ("W", "U", "b", "v"):
                params[key] = params[key] - cfg.lr * grads[key]
            params["c"] = params["c"] - cfg.lr * grads["c"]
        history.append(float(np.mean(epoch_losses)))
        if val_x is not None:
            val_loss = loss_value(params, val_x, val_y)
            if val_loss < best_val - 1e-12:
                best_val = val_loss
                best_params = _copy_params(params)
                stale = 0
            else:
                stale += 1
                if stale >= cfg.patience:
                    break
    if best_params is not None:
        params = best_params
    return params, history


def score_lstm(params: dict, x_seq: np.ndarray) -> np.ndarray:
    logits, _, _ = _forward(params, x_seq)
    return sigmoid(logits)
