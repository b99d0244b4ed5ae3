"""Tree ensembles from first principles: CART random forest and second-order boosting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ModelError, sigmoid

_TINY_GAIN = 1e-12


# ---------------------------------------------------------------------------
# random forest (Gini CART)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 8
    min_leaf: int = 5
    max_features: str | None = "sqrt"  # "sqrt" or None for all
    bootstrap: bool = True


def _gini_from_counts(pos: np.ndarray, total: np.ndarray) -> np.ndarray:
    frac = np.divide(pos, total, out=np.zeros_like(pos, dtype=float), where=total > 0)
    return 1.0 - frac**2 - (1.0 - frac) ** 2


def _best_gini_split(x: np.ndarray, y: np.ndarray, features: np.ndarray, min_leaf: int):
    """Best (feature, threshold, weighted impurity) over the candidate features.

    Thresholds are midpoints between distinct consecutive sorted values; both
    children must keep at least min_leaf samples. Ties resolve to the first
    feature in ascending order, then the lowest threshold.
    """
    n = len(y)
    best = None  # (impurity, feature, threshold)
    for feature in features:
        values = x[:, feature]
        order = np.argsort(values, kind="stable")
        sorted_values = values[order]
        pos_prefix = np.cumsum(y[order])
        left_n = np.arange(1, n)
        boundary = sorted_values[:-1] < sorted_values[1:]
        valid = boundary & (left_n >= min_leaf) & (n - left_n >= min_leaf)
        if not valid.any():
            continue
        left_pos = pos_prefix[:-1]
        right_pos = pos_prefix[-1] - left_pos
        impurity = (
            left_n * _gini_from_counts(left_pos, left_n)
            + (n - left_n) * _gini_from_counts(right_pos, n - left_n)
        ) / n
        impurity = np.where(valid, impurity, np.inf)
        k = int(np.argmin(impurity))
        if best is None or impurity[k] < best[0] - _TINY_GAIN:
            threshold = (sorted_values[k] + sorted_values[k + 1]) / 2.0
            best = (float(impurity[k]), int(feature), float(threshold))
    return best


def _grow_gini(x, y, idx, depth, cfg: ForestConfig, rng) -> dict:
    sub_y = y[idx]
    n = len(idx)
    pos = int(sub_y.sum())
    prob = pos / n
    if depth >= cfg.max_depth or n < 2 * cfg.min_leaf or pos in (0, n):
        return {"value": prob}
    p = x.shape[1]
    if cfg.max_features == "sqrt":
        k = max(1, int(np.sqrt(p)))
        features = np.sort(rng.choice(p, size=k, replace=False))
    else:
        features = np.arange(p)
    parent = _gini_from_counts(np.array([pos]), np.array([n]))[0]
    found = _best_gini_split(x[idx], sub_y, features, cfg.min_leaf)
    if found is None or found[0] >= parent - _TINY_GAIN:
        return {"value": prob}
    _, feature, threshold = found
    mask = x[idx, feature] < threshold
    left = _grow_gini(x, y, idx[mask], depth + 1, cfg, rng)
    right = _grow_gini(x, y, idx[~mask], depth + 1, cfg, rng)
    return {"feature": feature, "threshold": threshold, "left": left, "right": right}


def _tree_values(node: dict, x: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape[0])
    stack = [(node, np.arange(x.shape[0]))]
    while stack:
        current, idx = stack.pop()
        if "value" in current:
            out[idx] = current["value"]
            continue
        mask = x[idx, current["feature"]] < current["threshold"]
        stack.append((current["left"], idx[mask]))
        stack.append((current["right"], idx[~mask]))
    return out


def train_random_forest(x: np.ndarray, y: np.ndarray, cfg: ForestConfig = ForestConfig(),
                        seed: int = 0) -> dict:
    """Bagged Gini CART trees; the score is the fraction of trees voting positive."""
    n = x.shape[0]
    trees = []
    for t in range(cfg.n_trees):
        rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
        if cfg.bootstrap:
            idx = rng.integers(0, n, size=n)
        else:
            idx = np.arange(n)
        trees.append(_grow_gini(x, y, idx, 0, cfg, rng))
    return {"trees": trees}


def score_forest(params: dict, x: np.ndarray) -> np.ndarray:
    votes = np.zeros(x.shape[0])
    for tree in params["trees"]:
        votes += (_tree_values(tree, x) > 0.5).astype(float)
    return votes / len(params["trees"])


# ---------------------------------------------------------------------------
# gradient boosting (XGBoost-style second-order leaf weights)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class XgbConfig:
    rounds: int = 100
    max_depth: int = 3
    lr: float = 0.1
    l2: float = 1.0  # lambda in the leaf weight -G/(H+lambda)


def _best_gain_split(x, g, h, l2):
    n = len(g)
    total_g = g.sum()
    total_h = h.sum()
    base = total_g**2 / (total_h + l2)
    best = None  # (gain, feature, threshold)
    for feature in range(x.shape[1]):
        values = x[:, feature]
        order = np.argsort(values, kind="stable")
        sorted_values = values[order]
        g_prefix = np.cumsum(g[order])[:-1]
        h_prefix = np.cumsum(h[order])[:-1]
        boundary = sorted_values[:-1] < sorted_values[1:]
        if not boundary.any():
            continue
        gain = 0.5 * (
            g_prefix**2 / (h_prefix + l2)
            + (total_g - g_prefix) ** 2 / (total_h - h_prefix + l2)
            - base
        )
        gain = np.where(boundary, gain, -np.inf)
        k = int(np.argmax(gain))
        if gain[k] > _TINY_GAIN and (best is None or gain[k] > best[0] + _TINY_GAIN):
            threshold = (sorted_values[k] + sorted_values[k + 1]) / 2.0
            best = (float(gain[k]), feature, float(threshold))
    return best


def _grow_xgb(x, g, h, idx, depth, cfg: XgbConfig) -> dict:
    if depth >= cfg.max_depth or len(idx) < 2:
        return {"value": float(-g[idx].sum() / (h[idx].sum() + cfg.l2))}
    found = _best_gain_split(x[idx], g[idx], h[idx], cfg.l2)
    if found is None:
        return {"value": float(-g[idx].sum() / (h[idx].sum() + cfg.l2))}
    _, feature, threshold = found
    mask = x[idx, feature] < threshold
    left = _grow_xgb(x, g, h, idx[mask], depth + 1, cfg)
    right = _grow_xgb(x, g, h, idx[~mask], depth + 1, cfg)
    return {"feature": feature, "threshold": threshold, "left": left, "right": right}


def train_xgboost(x: np.ndarray, y: np.ndarray, cfg: XgbConfig = XgbConfig()) -> dict:
    """Boosted trees on logistic loss with second-order leaf weights -G/(H+lambda).

    The ensemble starts from the log-odds of the base rate and adds lr-scaled
    tree outputs; the score is the sigmoid of the summed margin.
    """
    n = x.shape[0]
    base_rate = float(y.mean())
    if not 0.0 < base_rate < 1.0:
        raise ModelError("both classes must be present")
    f0 = float(np.log(base_rate / (1.0 - base_rate)))
    margin = np.full(n, f0)
    trees = []
    idx = np.arange(n)
    for _ in range(cfg.rounds):
        prob = sigmoid(margin)
        g = prob - y
        h = prob * (1.0 - prob)
        tree = _grow_xgb(x, g, h, idx, 0, cfg)
        trees.append(tree)
        margin = margin + cfg.lr * _tree_values(tree, x)
        if not np.isfinite(margin).all():
            raise ModelError("non-finite boosting margin")
    return {"f0": f0, "lr": cfg.lr, "trees": trees}


def score_xgboost(params: dict, x: np.ndarray) -> np.ndarray:
    margin = np.full(x.shape[0], params["f0"])
    for tree in params["trees"]:
        margin = margin + params["lr"] * _tree_values(tree, x)
    return sigmoid(margin)
