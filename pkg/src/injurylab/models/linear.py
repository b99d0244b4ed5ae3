"""Logistic regression (full-batch gradient descent) and a linear SVC (hinge-loss SGD)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import ModelError, log_loss, sigmoid


@dataclass(frozen=True)
class LogitConfig:
    lr: float = 0.1
    epochs: int = 2000
    l2: float = 1e-4
    grad_tol: float = 1e-6


def train_logit(x: np.ndarray, y: np.ndarray, cfg: LogitConfig = LogitConfig()):
    """Minimize mean log-loss + l2*||w||^2 by full-batch gradient descent.

    Stops early when the gradient infinity-norm drops below grad_tol. Returns
    (params, loss_history); the history lets callers verify the loss is
    non-increasing.
    """
    n, p = x.shape
    w = np.zeros(p)
    b = 0.0
    history = []
    for epoch in range(cfg.epochs):
        z = x @ w + b
        loss = log_loss(z, y) + cfg.l2 * float(w @ w)
        if not math.isfinite(loss):
            raise ModelError(f"non-finite logit loss at epoch {epoch}")
        history.append(loss)
        probs = sigmoid(z)
        grad_w = x.T @ (probs - y) / n + 2.0 * cfg.l2 * w
        grad_b = float(np.mean(probs - y))
        if max(np.abs(grad_w).max() if p else 0.0, abs(grad_b)) < cfg.grad_tol:
            break
        w -= cfg.lr * grad_w
        b -= cfg.lr * grad_b
    return {"w": w, "b": b}, history


def score_logit(params: dict, x: np.ndarray) -> np.ndarray:
    return sigmoid(x @ params["w"] + params["b"])


@dataclass(frozen=True)
class SvcConfig:
    lr: float = 0.01
    passes: int = 50
    l2: float = 1e-3


def train_svc(x: np.ndarray, y: np.ndarray, cfg: SvcConfig = SvcConfig(), seed: int = 0):
    """Linear SVM via seed-shuffled SGD on hinge loss + l2*||w||^2.

    The score is sigmoid(margin): a ranking-faithful squashing into [0, 1].
    """
    n, p = x.shape
    signs = np.where(y > 0, 1.0, -1.0)
    w = np.zeros(p)
    b = 0.0
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    for _ in range(cfg.passes):
        for i in rng.permutation(n):
            margin = signs[i] * (x[i] @ w + b)
            if margin < 1.0:
                w -= cfg.lr * (2.0 * cfg.l2 * w - signs[i] * x[i])
                b += cfg.lr * signs[i]
            else:
                w -= cfg.lr * 2.0 * cfg.l2 * w
        if not np.isfinite(w).all() or not math.isfinite(b):
            raise ModelError("non-finite SVC parameters")
    return {"w": w, "b": b}


def score_svc(params: dict, x: np.ndarray) -> np.ndarray:
    return sigmoid(x @ params["w"] + params["b"])
