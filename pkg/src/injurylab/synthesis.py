"""Synthetic training windows: Gaussian copula per class, plus a jitter fallback."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .windowing import WindowSample

MIN_FIT_SAMPLES = 5
PSD_FLOOR = 1e-8
JITTER_NOISE_FRACTION = 0.05


class SynthesisError(ValueError):
    pass


def _class_matrix(samples: Sequence[WindowSample], label: int) -> np.ndarray:
    rows = [s.x for s in samples if s.label == label]
    if not rows:
        raise SynthesisError(f"no samples of class {label}")
    return np.vstack(rows)


def _mid_ranks(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with ties sharing their mid-rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_values = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_values[j + 1] == sorted_values[i]:
            j += 1
        ranks[order[i: j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _repair_psd(matrix: np.ndarray) -> np.ndarray:
    """Clip eigenvalues at the floor, then re-normalize to unit diagonal."""
    sym = (matrix + matrix.T) / 2.0
    eigenvalues, eigenvectors = np.linalg.eigh(sym)
    eigenvalues = np.clip(eigenvalues, PSD_FLOOR, None)
    repaired = eigenvectors @ np.diag(eigenvalues) @ eigenvectors.T
    d = np.sqrt(np.diag(repaired))
    repaired = repaired / np.outer(d, d)
    np.fill_diagonal(repaired, 1.0)
    return repaired


@dataclass
class CopulaModel:
    marginals: list[np.ndarray]  # sorted per-feature value tables
    correlation: np.ndarray  # latent correlations, PSD-repaired, unit diagonal
    label: int
    n_fitted: int
    kind: str = "copula"

    def sample_matrix(self, n: int, seed) -> np.ndarray:
        if n == 0:
            return np.empty((0, len(self.marginals)))
        rng = np.random.default_rng(seed)
        eigenvalues, eigenvectors = np.linalg.eigh(self.correlation)
        factor = eigenvectors @ np.diag(np.sqrt(np.clip(eigenvalues, 0.0, None)))
        z = rng.standard_normal((n, len(self.marginals))) @ factor.T
        u = ndtr(z)
        out = np.empty_like(z)
        for j, table in enumerate(self.marginals):
            m = len(table)
            probs = (np.arange(m) + 0.5) / m
            out[:, j] = np.interp(u[:, j], probs, table)
        return out


@dataclass
class JitterModel:
    """Tiny-class fallback: resample real rows plus Gaussian noise at 5% of feature SD."""

    rows: np.ndarray
    label: int
    kind: str = "jitter"

    def sample_matrix(self, n: int, seed) -> np.ndarray:
        if n == 0:
            return np.empty((0, self.rows.shape[1]))
        rng = np.random.default_rng(seed)
        n_rows = self.rows.shape[0]
        sd = self.rows.std(axis=0, ddof=1) if n_rows > 1 else np.zeros(self.rows.shape[1])
        picks = rng.integers(0, n_rows, size=n)
        noise = rng.standard_normal((n, self.rows.shape[1])) * (JITTER_NOISE_FRACTION * sd)
        out = self.rows[picks] + noise
        lo = self.rows.min(axis=0)
        hi = self.rows.max(axis=0)
        return np.clip(out, lo, hi)


def fit(train_windows: Sequence[WindowSample], label: int) -> CopulaModel:
    """Fit a Gaussian copula to the given class of training windows.

    Marginals are empirical CDFs via rank transform; latent correlations are
    Pearson correlations of the normal scores, repaired to PSD by eigenvalue
    clipping and diagonal re-normalization.
    """
    x = _class_matrix(train_windows, label)
    n, p = x.shape
    if n < MIN_FIT_SAMPLES:
        raise SynthesisError(
            f"class {label} has {n} samples; need at least {MIN_FIT_SAMPLES} to fit a copula"
        )
    scores = np.empty_like(x)
    constant = np.zeros(p, dtype=bool)
    for j in range(p):
        column = x[:, j]
        if column.max() == column.min():
            constant[j] = True
            scores[:, j] = 0.0
            continue
        u = (_mid_ranks(column) - 0.5) / n
        scores[:, j] = ndtri(u)

    correlation = np.eye(p)
    varying = ~constant
    if varying.sum() >= 2:
        sub = np.corrcoef(scores[:, varying], rowvar=False)
        correlation[np.ix_(varying, varying)] = sub
    correlation = _repair_psd(correlation)
    marginals = [np.sort(x[:, j]) for j in range(p)]
    return CopulaModel(marginals=marginals, correlation=correlation, label=label, n_fitted=n)


def fit_synthesizer(
    train_windows: Sequence[WindowSample], label: int
) -> CopulaModel | JitterModel:
    """Copula when the class is big enough, jitter resampling otherwise."""
    try:
        return fit(train_windows, label)
    except SynthesisError:
        rows = _class_matrix(train_windows, label)
        return JitterModel(rows=rows, label=label)


def sample(model, n: int, seed) -> list[WindowSample]:
    """Draw n synthetic windows of the model's class."""
    if n < 0:
        raise SynthesisError("n must be >= 0")
    matrix = model.sample_matrix(n, seed)
    return [
        WindowSample(
            player="", anchor_date=None, x=matrix[i].copy(),
            label=model.label, provenance="synthetic",
        )
        for i in range(n)
    ]


# ---------------------------------------------------------------------------
# class balancing
# ---------------------------------------------------------------------------

def balance(
    train: Sequence[WindowSample],
    target_event_proportion: float,
    multiplier: float,
    models: dict,
    seed: int = 0,
) -> tuple[list[WindowSample], dict]:
    """Add synthetic windows so positives/total hits the target proportion.

    The target size is multiplier x len(train); it grows further when the real
    negatives already exceed their share (real samples are never deleted). If
    the real positives alone exceed the positive share of the target size the
    proportion is unreachable without deletion and this is a hard error.
    """
    if not 0.0 < target_event_proportion < 1.0:
        raise SynthesisError("target_event_proportion must be in (0, 1)")
    if multiplier < 1:
        raise SynthesisError("multiplier must be >= 1")
    train = list(train)
    n_pos = sum(1 for s in train if s.label == 1)
    n_neg = len(train) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SynthesisError("both classes must be present in train")

    target_total = int(round(multiplier * len(train)))
    if n_pos > round(target_event_proportion * target_total):
        feasible = n_pos / target_total
        raise SynthesisError(
            f"{n_pos} real positives exceed the target share; "
            f"minimum feasible proportion is {feasible:.4f}"
        )
    total = max(target_total, math.ceil(n_neg / (1.0 - target_event_proportion)))
    pos_target = int(round(target_event_proportion * total))
    neg_target = total - pos_target
    add_pos = pos_target - n_pos
    add_neg = neg_target - n_neg

    out = list(train)
    out += sample(models[1], add_pos, np.random.SeedSequence([seed, 1]))
    out += sample(models[0], add_neg, np.random.SeedSequence([seed, 0]))
    achieved = (n_pos + add_pos) / len(out)
    assert abs(achieved - target_event_proportion) <= 1.0 / len(out) + 1e-12
    info = {
        "target_proportion": target_event_proportion,
        "multiplier": multiplier,
        "added_positive": add_pos,
        "added_negative": add_neg,
        "achieved_proportion": achieved,
        "synthesizer": {
            "positive": models[1].kind,
            "negative": models[0].kind,
        },
    }
    return out, info
