"""Stage implementations behind the CLI: each reads earlier-stage outputs only."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import evaluation, synthesis
from .config import GlobalConfig, config_snapshot
from .features import aggregate_session, downsample_1hz
from .ingest import (
    GpsReadStats,
    filter_plausible,
    link_injuries,
    read_gps,
    read_injury_rows,
    read_match_stats,
    read_roster,
    read_subjective,
)
from .manifest import StageTimer, write_stage_manifest
from .models import save_model, train_model
from .store import default_catalog, fuse, impute, read_store, write_store
from .windowing import (
    WindowDataset,
    build_windows,
    materialize_rounds,
    read_windows_csv,
    write_windows_csv,
)


class StageError(RuntimeError):
    pass


def _require(path: Path, produced_by: str) -> Path:
    if not path.exists():
        raise StageError(f"{path} is missing; run `{produced_by}` first")
    return path


def preprocess(cfg: GlobalConfig) -> dict:
    """Raw sources -> plausibility-filtered aggregates -> fused, imputed store CSV."""
    timer = StageTimer()
    paths = cfg.paths
    for name in ("subjective_dir", "gps_dir", "match_csv", "injuries_csv", "roster_csv"):
        path = Path(getattr(paths, name))
        if not path.exists():
            raise StageError(f"configured input {name}={path} does not exist")

    subjective = read_subjective(paths.subjective_dir)

    gps_stats = GpsReadStats()
    stream, retention = filter_plausible(
        read_gps(paths.gps_dir, stats=gps_stats), cfg.plausibility
    )
    by_session: dict[tuple, list] = {}
    for sample in stream:
        by_session.setdefault((sample.player, sample.date, sample.session), []).append(sample)
    aggregates = []
    for key in sorted(by_session):
        session = sorted(by_session[key], key=lambda s: s.timestamp)
        aggregates.append(aggregate_session(downsample_1hz(session), cfg.zones))

    match = read_match_stats(paths.match_csv, cfg.match_attributes)
    linked = link_injuries(read_injury_rows(paths.injuries_csv), read_roster(paths.roster_csv))

    catalog = default_catalog(match_attributes=cfg.match_attributes)
    store = fuse(
        subjective, aggregates, match, linked.events,
        catalog=catalog, load_model=cfg.load_model,
    )
    records, impute_report = impute(store.records, cfg.imputation, catalog)
    store.records = records

    store_path = Path(paths.store_path)
    write_store(store, store_path)

    extra = {
        "retention": {
            "total": retention.total,
            "kept": retention.kept,
            "fraction": retention.retention,
            "drops": retention.drops,
        },
        "gps_rows_skipped": gps_stats.skipped,
        "records": len(store.records),
        "off_session_injuries": len(store.off_session_injuries),
        "unmatched_injuries": [
            {"name": u.row.name, "date": u.row.date.isoformat(), "reason": u.reason}
            for u in linked.unmatched
        ],
        "imputation": {
            "method": impute_report.method,
            "filled": impute_report.filled,
            "global_median_fallbacks": impute_report.global_median_fallbacks,
        },
    }
    write_stage_manifest(
        store_path.parent, "preprocess",
        {name: Path(getattr(paths, name))
         for name in ("subjective_dir", "gps_dir", "match_csv", "injuries_csv", "roster_csv")},
        config_snapshot(cfg), timer, extra,
    )
    return extra


def build_windows_stage(cfg: GlobalConfig) -> dict:
    timer = StageTimer()
    store_path = _require(Path(cfg.paths.store_path), "preprocess")
    store = read_store(store_path)
    dataset = build_windows(store, cfg.window)
    windows_path = Path(cfg.paths.windows_path)
    windows_path.parent.mkdir(parents=True, exist_ok=True)
    write_windows_csv(windows_path, dataset)
    extra = {
        "windows": len(dataset.samples),
        "positives": sum(s.label for s in dataset.samples),
        "features": len(dataset.feature_names),
    }
    write_stage_manifest(
        windows_path.parent, "build_windows", {"store": store_path},
        config_snapshot(cfg), timer, extra,
    )
    return extra


def synth_stage(cfg: GlobalConfig, force: bool = False) -> dict:
    """Split windows into MCCV rounds and balance each round's training side."""
    timer = StageTimer()
    windows_path = _require(Path(cfg.paths.windows_path), "build-windows")
    dataset = read_windows_csv(windows_path, cfg.window.n_in)

    def balance_hook(train_samples, round_index):
        if cfg.synthesis.kind == "jitter":
            models = {
                label: synthesis.JitterModel(
                    rows=np.vstack([s.x for s in train_samples if s.label == label]),
                    label=label,
                )
                for label in (0, 1)
            }
        else:
            models = {
                label: synthesis.fit_synthesizer(train_samples, label) for label in (0, 1)
            }
        seed = int(
            np.random.SeedSequence([cfg.window.seed, round_index, 7]).generate_state(1)[0]
        )
        return synthesis.balance(
            train_samples, cfg.synthesis.event_proportion, cfg.synthesis.multiplier,
            models, seed=seed,
        )

    rounds_dir = Path(cfg.paths.rounds_dir)
    manifest = materialize_rounds(
        dataset, cfg.window, rounds_dir, balance_train=balance_hook, force=force
    )
    write_stage_manifest(
        rounds_dir, "synth", {"windows": windows_path}, config_snapshot(cfg), timer,
        {"rounds": cfg.window.rounds, "balance": manifest["balance"]},
    )
    return manifest


def train_stage(cfg: GlobalConfig, kind: str, round_index: int = 0) -> Path:
    timer = StageTimer()
    round_dir = _require(
        Path(cfg.paths.rounds_dir) / f"round_{round_index}", "synth"
    )
    dataset = read_windows_csv(round_dir / "train.csv", cfg.window.n_in)
    x = np.vstack([s.x for s in dataset.samples])
    y = np.array([s.label for s in dataset.samples], dtype=float)
    seed = int(
        np.random.SeedSequence([cfg.seed, round_index]).generate_state(1)[0]
    )
    model = train_model(
        kind, x, y, dataset.feature_names, cfg.window.n_in,
        seed=seed, config=cfg.model_config(kind),
    )
    models_dir = Path(cfg.paths.models_dir)
    path = save_model(model, models_dir)
    write_stage_manifest(
        models_dir, f"train_{kind}", {"round": round_dir}, config_snapshot(cfg), timer,
        {"model_file": path.name, "round_index": round_index},
    )
    return path


def evaluate_stage(cfg: GlobalConfig, kind: str) -> dict:
    """Run every materialized round for one model and aggregate the metrics."""
    timer = StageTimer()
    rounds_dir = _require(Path(cfg.paths.rounds_dir), "synth")
    metrics = []
    for k in range(cfg.window.rounds):
        round_dir = _require(rounds_dir / f"round_{k}", "synth")
        metrics.append(
            evaluation.run_round(
                round_dir, kind, cfg.window.n_in, cfg.seed, k,
                model_config=cfg.model_config(kind),
            )
        )
    curve = evaluation.mean_roc([m.roc for m in metrics])
    summary = {
        "model": kind,
        "rounds": cfg.window.rounds,
        "mean": {
            name: float(np.mean([getattr(m, name) for m in metrics]))
            for name in evaluation.METRIC_NAMES
        },
        "sd": {
            name: (
                float(np.std([getattr(m, name) for m in metrics], ddof=1))
                if len(metrics) > 1 else 0.0
            )
            for name in evaluation.METRIC_NAMES
        },
        "mean_roc": curve.points.tolist(),
    }
    results_dir = Path(cfg.paths.results_dir)
    results_dir.mkdir(parents=True, exist_ok=True)
    with open(results_dir / f"evaluate_{kind}.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1)
    write_stage_manifest(
        results_dir, f"evaluate_{kind}", {"rounds": rounds_dir},
        config_snapshot(cfg), timer, {"mean": summary["mean"]},
    )
    return summary


def grid_stage(cfg: GlobalConfig, cells: list[str] | None = None, force: bool = False):
    timer = StageTimer()
    store_path = _require(Path(cfg.paths.store_path), "preprocess")
    store = read_store(store_path)
    grid = cfg.grid
    if cells:
        wanted = set(cells)
        known = {c.id for c in grid.cells()}
        missing = wanted - known
        if missing:
            raise StageError(f"unknown grid cell id(s): {sorted(missing)}")
    results_dir = Path(cfg.paths.results_dir)
    model_configs = {kind: cfg.model_config(kind) for kind in grid.models}

    if cells:
        outcome = evaluation.GridOutcome(results=[])
        dataset_cache: dict[tuple, WindowDataset] = {}
        for cell_cfg in grid.cells():
            if cell_cfg.id not in wanted:
                continue
            key = (cell_cfg.n_in, cell_cfg.n_out, cell_cfg.features)
            cell_dir = (
                results_dir / "cells"
                / f"in{cell_cfg.n_in}_out{cell_cfg.n_out}_rho{cell_cfg.event_proportion:g}"
            )
            try:
                if key not in dataset_cache:
                    dataset_cache[key] = build_windows(store, cell_cfg.window_spec())
                result = evaluation.run_cell(
                    store, cell_cfg, cell_dir,
                    model_config=model_configs.get(cell_cfg.model),
                    dataset=dataset_cache[key], force=force,
                )
                outcome.results.append(result)
                evaluation.write_cell_roc(results_dir, result)
            except Exception as exc:  # cell failures recorded, grid continues
                outcome.failures[cell_cfg.id] = f"{type(exc).__name__}: {exc}"
        evaluation.write_reports(results_dir, outcome)
    else:
        outcome = evaluation.run_grid(
            store, grid, results_dir, model_configs=model_configs, force=force
        )
    write_stage_manifest(
        results_dir, "grid", {"store": store_path}, config_snapshot(cfg), timer,
        {"cells_run": len(outcome.results), "failures": outcome.failures},
    )
    return outcome
