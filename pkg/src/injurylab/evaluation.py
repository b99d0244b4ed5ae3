"""Confusion metrics, ROC/AUC, MCCV aggregation, and the experiment grid runner."""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import models as model_api
from . import synthesis
from .store import FeatureStore
from .windowing import (
    WindowDataset,
    WindowSpec,
    build_windows,
    materialize_rounds,
    read_windows_csv,
)


class EvaluationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# confusion-matrix metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(y_true: Sequence[int], y_pred: Sequence[int]) -> ConfusionMatrix:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise EvaluationError("y_true and y_pred must have equal lengths")
    return ConfusionMatrix(
        tp=int(((y_true == 1) & (y_pred == 1)).sum()),
        fp=int(((y_true == 0) & (y_pred == 1)).sum()),
        tn=int(((y_true == 0) & (y_pred == 0)).sum()),
        fn=int(((y_true == 1) & (y_pred == 0)).sum()),
    )


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def precision(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fp)


def tpr(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fn)


def tnr(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tn, cm.tn + cm.fp)


def f1(cm: ConfusionMatrix) -> float:
    p, r = precision(cm), tpr(cm)
    return 2.0 * p * r / (p + r) if p + r else 0.0


def percent_change(old: float, new: float) -> float:
    if old == 0:
        raise EvaluationError("percent change from zero is undefined")
    return (new - old) / old * 100.0


# ---------------------------------------------------------------------------
# ROC / AUC
# ---------------------------------------------------------------------------

@dataclass
class RocCurve:
    points: np.ndarray  # (k, 2) rows of (fpr, tpr), from (0,0) to (1,1)
    auc: float


def roc(y_true: Sequence[int], scores: Sequence[float]) -> RocCurve:
    """ROC by descending score with tie groups collapsed into one diagonal step."""
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=float)
    if y_true.shape != scores.shape:
        raise EvaluationError("y_true and scores must have equal lengths")
    n_pos = int((y_true == 1).sum())
    n_neg = int((y_true == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("ROC needs at least one positive and one negative")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_y = y_true[order]
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    n = len(sorted_y)
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        tp += int((sorted_y[i: j + 1] == 1).sum())
        fp += int((sorted_y[i: j + 1] == 0).sum())
        points.append((fp / n_neg, tp / n_pos))
        i = j + 1
    array = np.array(points)
    auc = float(np.trapezoid(array[:, 1], array[:, 0]))
    return RocCurve(points=array, auc=auc)


FPR_GRID = np.round(np.linspace(0.0, 1.0, 101), 2)


def _tpr_at(curve: RocCurve, grid: np.ndarray) -> np.ndarray:
    """Upper-envelope TPR at each grid FPR (vertical segments take their top)."""
    fprs = curve.points[:, 0]
    tprs = curve.points[:, 1]
    best: dict[float, float] = {}
    for x, y in zip(fprs, tprs):
        if x not in best or y > best[x]:
            best[x] = y
    xs = np.array(sorted(best))
    ys = np.array([best[x] for x in xs])
    return np.interp(grid, xs, ys)


def mean_roc(curves: Sequence[RocCurve]) -> RocCurve:
    """Vertical averaging on a 101-point FPR grid."""
    if not curves:
        raise EvaluationError("mean_roc needs at least one curve")
    stacked = np.vstack([_tpr_at(curve, FPR_GRID) for curve in curves])
    mean_tpr = stacked.mean(axis=0)
    points = np.column_stack([FPR_GRID, mean_tpr])
    return RocCurve(points=points, auc=float(np.trapezoid(mean_tpr, FPR_GRID)))


# ---------------------------------------------------------------------------
# experiment configuration and rounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    id: str
    event_proportion: float
    n_in: int
    n_out: int
    features: tuple[str, ...]
    model: str
    rounds: int
    seed: int
    data: str = "R+S"
    multiplier: float = 1.0
    test_fraction: float = 0.2
    max_span_days: int = 14
    split_by: str = "window"

    def window_spec(self) -> WindowSpec:
        return WindowSpec(
            n_in=self.n_in,
            n_out=self.n_out,
            max_span_days=self.max_span_days,
            features=self.features,
            test_fraction=self.test_fraction,
            rounds=self.rounds,
            seed=self.seed,
            split_by=self.split_by,
        )


@dataclass
class RoundMetrics:
    precision: float
    tpr: float
    tnr: float
    f1: float
    auc: float
    confusion: ConfusionMatrix
    roc: RocCurve


METRIC_NAMES = ("precision", "tpr", "tnr", "f1", "auc")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rounds: list[RoundMetrics]
    mean_curve: RocCurve

    def mean(self, name: str) -> float:
        return float(np.mean([getattr(r, name) for r in self.rounds]))

    def sd(self, name: str) -> float:
        values = [getattr(r, name) for r in self.rounds]
        return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0

    def check_bounds(self) -> None:
        for name in METRIC_NAMES:
            values = [getattr(r, name) for r in self.rounds]
            if not min(values) - 1e-12 <= self.mean(name) <= max(values) + 1e-12:
                raise EvaluationError(f"mean {name} outside per-round range")


def run_round(
    round_dir: str | Path,
    model_kind: str,
    n_in: int,
    seed: int,
    round_index: int,
    model_config=None,
) -> RoundMetrics:
    """Train on round train.csv, score round test.csv, report all metrics."""
    round_dir = Path(round_dir)
    try:
        train = read_windows_csv(round_dir / "train.csv", n_in)
        test = read_windows_csv(round_dir / "test.csv", n_in)
        x_train = np.vstack([s.x for s in train.samples])
        y_train = np.array([s.label for s in train.samples], dtype=float)
        x_test = np.vstack([s.x for s in test.samples])
        y_test = np.array([s.label for s in test.samples], dtype=int)
        model_seed = int(
            np.random.SeedSequence([seed, round_index]).generate_state(1)[0]
        )
        model = model_api.train_model(
            model_kind, x_train, y_train, train.feature_names, n_in,
            seed=model_seed, config=model_config,
        )
        scores = model_api.score(model, x_test)
        y_pred = (scores > 0.5).astype(int)
        cm = confusion(y_test, y_pred)
        curve = roc(y_test, scores)
    except Exception as exc:
        raise EvaluationError(f"round {round_index}: {exc}") from exc
    return RoundMetrics(
        precision=precision(cm), tpr=tpr(cm), tnr=tnr(cm), f1=f1(cm),
        auc=curve.auc, confusion=cm, roc=curve,
    )


# ---------------------------------------------------------------------------
# the grid
# ---------------------------------------------------------------------------

GRID_MODEL_ORDER = ("logit", "lstm", "randomforest", "svc", "xgboost")


@dataclass(frozen=True)
class GridSpec:
    inputs: tuple[int, ...] = (3, 5, 7)
    outputs: tuple[int, ...] = (1, 3, 7)
    proportions: tuple[float, ...] = (0.1, 0.25, 0.5)
    models: tuple[str, ...] = GRID_MODEL_ORDER
    rounds: int = 30
    features: tuple[str, ...] = ("TL", "W", "GPS")
    test_fraction: float = 0.2
    max_span_days: int = 14
    multiplier: float = 1.0
    seed: int = 0
    split_by: str = "window"

    def cells(self) -> list[ExperimentConfig]:
        out = []
        k = 0
        for proportion in self.proportions:
            for n_in in self.inputs:
                for n_out in self.outputs:
                    for model in self.models:
                        k += 1
                        out.append(
                            ExperimentConfig(
                                id=f"I-{k}",
                                event_proportion=proportion,
                                n_in=n_in,
                                n_out=n_out,
                                features=self.features,
                                model=model,
                                rounds=self.rounds,
                                seed=self.seed,
                                multiplier=self.multiplier,
                                test_fraction=self.test_fraction,
                                max_span_days=self.max_span_days,
                                split_by=self.split_by,
                            )
                        )
        return out


def _format_event(value: float) -> str:
    return f"{value:g}"


def render_results_rows(results: Sequence[ExperimentResult]) -> list[list[str]]:
    rows = [["ID", "Data", "Event", "Input", "Output", "Features", "Model",
             "Prec", "TPR", "F1", "AUC"]]
    for result in results:
        cfg = result.config
        rows.append([
            cfg.id,
            cfg.data,
            _format_event(cfg.event_proportion),
            f"{cfg.n_in:.1f}",
            f"{cfg.n_out:.1f}",
            ",".join(cfg.features),
            cfg.model,
            f"{result.mean('precision'):.3f}",
            f"{result.mean('tpr'):.3f}",
            f"{result.mean('f1'):.3f}",
            f"{result.mean('auc'):.3f}",
        ])
    return rows


def render_results_csv(results: Sequence[ExperimentResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(render_results_rows(results))
    return buffer.getvalue()


def _balance_hook(dataset: WindowDataset, cfg: ExperimentConfig):
    def hook(train_samples, round_index):
        models = {
            label: synthesis.fit_synthesizer(train_samples, label) for label in (0, 1)
        }
        balance_seed = int(
            np.random.SeedSequence([cfg.seed, round_index, 7]).generate_state(1)[0]
        )
        return synthesis.balance(
            train_samples, cfg.event_proportion, cfg.multiplier, models,
            seed=balance_seed,
        )

    return hook


def run_cell(
    store: FeatureStore,
    cfg: ExperimentConfig,
    work_dir: Path,
    model_config=None,
    dataset: WindowDataset | None = None,
    force: bool = False,
) -> ExperimentResult:
    """Materialize this cell's rounds (if missing) and run every round."""
    spec = cfg.window_spec()
    if dataset is None:
        dataset = build_windows(store, spec)
    rounds_dir = work_dir
    has_rounds = (rounds_dir / "rounds_manifest.json").exists()
    if force or not has_rounds:
        materialize_rounds(
            dataset, spec, rounds_dir, balance_train=_balance_hook(dataset, cfg),
            force=force or has_rounds,
        )
    metrics = []
    for k in range(cfg.rounds):
        metrics.append(
            run_round(
                rounds_dir / f"round_{k}", cfg.model, cfg.n_in, cfg.seed, k,
                model_config=model_config,
            )
        )
    result = ExperimentResult(
        config=cfg, rounds=metrics, mean_curve=mean_roc([m.roc for m in metrics])
    )
    result.check_bounds()
    return result


@dataclass
class GridOutcome:
    results: list[ExperimentResult]
    failures: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_grid(
    store: FeatureStore,
    grid: GridSpec,
    out_dir: str | Path,
    model_configs: dict | None = None,
    force: bool = False,
) -> GridOutcome:
    """Run every cell, sharing window builds and round materializations across models.

    A failing cell is recorded and the grid continues; callers translate a
    non-empty failure map into a nonzero exit status.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outcome = GridOutcome(results=[])
    dataset_cache: dict[tuple, WindowDataset] = {}
    for cfg in grid.cells():
        window_key = (cfg.n_in, cfg.n_out, cfg.features)
        cell_dir = (
            out_dir / "cells"
            / f"in{cfg.n_in}_out{cfg.n_out}_rho{_format_event(cfg.event_proportion)}"
        )
        try:
            if window_key not in dataset_cache:
                dataset_cache[window_key] = build_windows(store, cfg.window_spec())
            model_config = (model_configs or {}).get(cfg.model)
            result = run_cell(
                store, cfg, cell_dir, model_config=model_config,
                dataset=dataset_cache[window_key], force=force,
            )
            outcome.results.append(result)
            write_cell_roc(out_dir, result)
        except Exception as exc:
            outcome.failures[cfg.id] = f"{type(exc).__name__}: {exc}"
            traceback.print_exc()
    write_reports(out_dir, outcome)
    return outcome


def write_cell_roc(out_dir: Path, result: ExperimentResult) -> None:
    roc_dir = out_dir / "roc"
    roc_dir.mkdir(exist_ok=True)
    with open(roc_dir / f"{result.config.id}_roc_mean.csv", "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fpr", "tpr"])
        for fpr_value, tpr_value in result.mean_curve.points:
            writer.writerow([f"{fpr_value:.3f}", f"{tpr_value:.3f}"])


def write_reports(out_dir: Path, outcome: GridOutcome) -> None:
    with open(out_dir / "results.csv", "w", encoding="utf-8") as fh:
        fh.write(render_results_csv(outcome.results))
    detail = {
        "generated": dt.datetime.now(dt.timezone.utc).isoformat(),
        "failures": outcome.failures,
        "cells": [
            {
                "id": result.config.id,
                "config": {
                    "event_proportion": result.config.event_proportion,
                    "n_in": result.config.n_in,
                    "n_out": result.config.n_out,
                    "features": list(result.config.features),
                    "model": result.config.model,
                    "rounds": result.config.rounds,
                    "seed": result.config.seed,
                    "data": result.config.data,
                    "multiplier": result.config.multiplier,
                },
                "mean": {name: result.mean(name) for name in METRIC_NAMES},
                "sd": {name: result.sd(name) for name in METRIC_NAMES},
                "rounds": [
                    {
                        "precision": m.precision,
                        "tpr": m.tpr,
                        "tnr": m.tnr,
                        "f1": m.f1,
                        "auc": m.auc,
                        "confusion": {
                            "tp": m.confusion.tp, "fp": m.confusion.fp,
                            "tn": m.confusion.tn, "fn": m.confusion.fn,
                        },
                    }
                    for m in result.rounds
                ],
                "mean_roc": result.mean_curve.points.tolist(),
            }
            for result in outcome.results
        ],
    }
    with open(out_dir / "results.json", "w", encoding="utf-8") as fh:
        json.dump(detail, fh, indent=1)
