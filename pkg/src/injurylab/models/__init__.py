"""Five binary classifiers behind one train/score interface.

Every model consumes the flattened window matrix (B, F*n_in); the LSTM is the
only one that reshapes it back into per-session sequences. Scores are always
probability-like values in [0, 1] and classification uses a strict threshold:
class 1 iff score > tau.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .base import (
    ModelError,
    Scaler,
    TrainedModel,
    data_hash,
    load_model,
    model_filename,
    save_model,
    sigmoid,
    to_sequences,
)
from .linear import LogitConfig, SvcConfig, score_logit, score_svc, train_logit, train_svc
from .lstm import LstmConfig, loss_and_grads, loss_value, score_lstm, train_lstm
from .trees import (
    ForestConfig,
    XgbConfig,
    score_forest,
    score_xgboost,
    train_random_forest,
    train_xgboost,
)

MODEL_KINDS = ("logit", "svc", "randomforest", "xgboost", "lstm")

_CONFIG_TYPES = {
    "logit": LogitConfig,
    "svc": SvcConfig,
    "randomforest": ForestConfig,
    "xgboost": XgbConfig,
    "lstm": LstmConfig,
}


def default_config(kind: str, **overrides):
    if kind not in _CONFIG_TYPES:
        raise ModelError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    return _CONFIG_TYPES[kind](**overrides)


def train_model(
    kind: str,
    x: np.ndarray,
    y: np.ndarray,
    feature_names: Sequence[str],
    n_in: int,
    seed: int = 0,
    config=None,
) -> TrainedModel:
    """Fit the scaler on the training data, then train the requested model on it."""
    if kind not in _CONFIG_TYPES:
        raise ModelError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ModelError("x must be (n, p) with one label per row")
    classes = set(np.unique(y).tolist())
    if not classes <= {0.0, 1.0} or len(classes) < 2:
        raise ModelError("training data must contain both classes 0 and 1")
    cfg = config if config is not None else _CONFIG_TYPES[kind]()

    scaler = Scaler.fit(x)
    scaled = scaler.transform(x)
    history: list[float] = []
    if kind == "logit":
        params, history = train_logit(scaled, y, cfg)
    elif kind == "svc":
        params = train_svc(scaled, y, cfg, seed=seed)
    elif kind == "randomforest":
        params = train_random_forest(scaled, y, cfg, seed=seed)
    elif kind == "xgboost":
        params = train_xgboost(scaled, y, cfg)
    else:
        params, history = train_lstm(to_sequences(scaled, n_in), y, cfg, seed=seed)

    manifest = {
        "kind": kind,
        "seed": seed,
        "config": {k: v for k, v in vars(cfg).items()},
        "n_in": n_in,
        "n_features": x.shape[1],
        "data_hash": data_hash(x, y.astype(int), feature_names),
    }
    return TrainedModel(
        kind=kind,
        params=params,
        scaler=scaler,
        feature_names=list(feature_names),
        n_in=n_in,
        manifest=manifest,
        loss_history=history,
    )


def score(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    """Probability-like scores in [0, 1] for flattened window rows."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    model.check_features(x)
    scaled = model.scaler.transform(x)
    if model.kind == "logit":
        return score_logit(model.params, scaled)
    if model.kind == "svc":
        return score_svc(model.params, scaled)
    if model.kind == "randomforest":
        return score_forest(model.params, scaled)
    if model.kind == "xgboost":
        return score_xgboost(model.params, scaled)
    return score_lstm(model.params, to_sequences(scaled, model.n_in))


def classify(model: TrainedModel, x: np.ndarray, tau: float = 0.5) -> np.ndarray:
    """Class 1 iff score strictly exceeds tau; a score of exactly tau is class 0."""
    return (score(model, x) > tau).astype(int)


__all__ = [
    "MODEL_KINDS",
    "ModelError",
    "Scaler",
    "TrainedModel",
    "LogitConfig",
    "SvcConfig",
    "ForestConfig",
    "XgbConfig",
    "LstmConfig",
    "default_config",
    "train_model",
    "score",
    "classify",
    "save_model",
    "load_model",
    "model_filename",
    "data_hash",
    "sigmoid",
    "to_sequences",
    "loss_and_grads",
    "loss_value",
]
