"""Shared model infrastructure: standard scaler, trained-model wrapper, serialization."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

DEGENERATE_SD = 1e-12


class ModelError(ValueError):
    pass


@dataclass
class Scaler:
    mean: np.ndarray
    sd: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Scaler":
        if x.size == 0:
            raise ModelError("cannot fit a scaler on empty data")
        mean = x.mean(axis=0)
        if x.shape[0] > 1:
            sd = x.std(axis=0, ddof=1)
        else:
            sd = np.ones(x.shape[1])
        sd = np.where(sd < DEGENERATE_SD, 1.0, sd)
        return cls(mean=mean, sd=sd)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.sd


def sigmoid(z: np.ndarray) -> np.ndarray:
    # stable in both tails
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    expz = np.exp(z[~pos])
    out[~pos] = expz / (1.0 + expz)
    return out


def log_loss(z: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross-entropy from logits, computed stably."""
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


@dataclass
class TrainedModel:
    kind: str
    params: dict
    scaler: Scaler
    feature_names: list[str]
    n_in: int
    manifest: dict
    loss_history: list[float] = field(default_factory=list)

    def check_features(self, x: np.ndarray) -> None:
        if x.ndim != 2 or x.shape[1] != len(self.feature_names):
            raise ModelError(
                f"expected {len(self.feature_names)} features, got "
                f"{x.shape[1] if x.ndim == 2 else 'non-matrix input'}"
            )

    def check_names(self, names: Sequence[str]) -> None:
        if list(names) != self.feature_names:
            raise ModelError("feature names do not match the training manifest")


def data_hash(x: np.ndarray, y: np.ndarray, names: Sequence[str]) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(x, dtype=np.float64).tobytes())
    digest.update(np.ascontiguousarray(y, dtype=np.int64).tobytes())
    digest.update(",".join(names).encode())
    return digest.hexdigest()


def to_sequences(x: np.ndarray, n_in: int) -> np.ndarray:
    """Reshape feature-major flat vectors (B, F*n_in) to sequences (B, n_in, F)."""
    b, total = x.shape
    if total % n_in:
        raise ModelError(f"{total} flat features do not divide into {n_in} steps")
    n_features = total // n_in
    return x.reshape(b, n_features, n_in).transpose(0, 2, 1)


# ---------------------------------------------------------------------------
# serialization: JSON manifest + numeric arrays as JSON lists
# ---------------------------------------------------------------------------

def _encode(value):
    if isinstance(value, np.ndarray):
        return {"__array__": value.tolist(), "dtype": str(value.dtype)}
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _decode(value):
    if isinstance(value, dict):
        if "__array__" in value:
            return np.array(value["__array__"], dtype=value["dtype"])
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


def model_filename(model: TrainedModel) -> str:
    digest = hashlib.sha256(
        json.dumps(model.manifest, sort_keys=True, default=str).encode()
    ).hexdigest()[:12]
    return f"model_{model.kind}_{digest}.json"


def save_model(model: TrainedModel, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = {
        "kind": model.kind,
        "params": _encode(model.params),
        "scaler": {"mean": model.scaler.mean.tolist(), "sd": model.scaler.sd.tolist()},
        "feature_names": model.feature_names,
        "n_in": model.n_in,
        "manifest": model.manifest,
        "loss_history": model.loss_history,
    }
    path = directory / model_filename(model)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
    return path


def load_model(path: str | Path) -> TrainedModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return TrainedModel(
        kind=payload["kind"],
        params=_decode(payload["params"]),
        scaler=Scaler(
            mean=np.array(payload["scaler"]["mean"]),
            sd=np.array(payload["scaler"]["sd"]),
        ),
        feature_names=payload["feature_names"],
        n_in=payload["n_in"],
        manifest=payload["manifest"],
        loss_history=payload.get("loss_history", []),
    )
