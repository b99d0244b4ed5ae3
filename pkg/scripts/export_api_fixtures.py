#!/usr/bin/env python3
"""Export real service payloads as JSON fixtures for the dashboard test suite.

Runs the full pipeline on the deterministic synthetic corpus, then captures
each endpoint's response exactly as the HTTP service would serialize it.

Usage:
    python scripts/export_api_fixtures.py frontend/tests/fixtures
"""

import argparse
import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from injurylab import pipeline
from injurylab.config import GlobalConfig, PathsConfig
from injurylab.evaluation import GridSpec
from injurylab.models import load_model
from injurylab.service import ApiState, base_feature_names, route
from injurylab.simdata import make_raw_corpus
from injurylab.store import read_store
from injurylab.windowing import WindowSpec


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--seed", type=int, default=5)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        make_raw_corpus(tmp / "raw", n_players=6, sessions_per_player=25,
                        n_injuries=10, seed=args.seed, gps_rows_per_session=40)
        cfg = GlobalConfig()
        cfg.seed = 11
        cfg.paths = PathsConfig(
            subjective_dir=str(tmp / "raw/subjective"),
            gps_dir=str(tmp / "raw/gps"),
            match_csv=str(tmp / "raw/match_stats.csv"),
            injuries_csv=str(tmp / "raw/injuries.csv"),
            roster_csv=str(tmp / "raw/roster.csv"),
            store_path=str(tmp / "out/store.csv"),
            windows_path=str(tmp / "out/windows.csv"),
            rounds_dir=str(tmp / "out/rounds"),
            results_dir=str(tmp / "out/results"),
            models_dir=str(tmp / "out/models"),
        )
        cfg.window = WindowSpec(n_in=3, n_out=1, rounds=2, seed=11)
        cfg.grid = GridSpec(inputs=(3,), outputs=(1,), proportions=(0.5,),
                            rounds=2, seed=11)
        pipeline.preprocess(cfg)
        pipeline.build_windows_stage(cfg)
        pipeline.synth_stage(cfg)
        model_path = pipeline.train_stage(cfg, "logit")
        pipeline.grid_stage(cfg)

        state = ApiState(
            read_store(cfg.paths.store_path),
            results_path=Path(cfg.paths.results_dir) / "results.json",
            models_dir=Path(cfg.paths.models_dir),
        )
        player = state.players()[0]
        fixtures = {
            "players": route(state, "GET", "/players", {}),
            "sessions": route(state, "GET", "/sessions", {}),
            "injuries": route(state, "GET", "/injuries", {}),
            "feature_series_numeric": route(
                state, "GET", "/features/acwr", {"player": [player]}
            ),
            "feature_series_categorical": route(
                state, "GET", "/features/body_region", {"player": [player]}
            ),
            "experiments": route(state, "GET", "/experiments", {}),
            "experiment_detail": route(state, "GET", "/experiments/I-1", {}),
        }

        model = load_model(model_path)
        bases = base_feature_names(model)
        store = read_store(cfg.paths.store_path)
        rows = [r for r in store.records if r.player == player][-model.n_in:]
        sessions = [{b: r.numeric[b] for b in bases} for r in rows]
        predict_request = {"model_id": model_path.stem, "sessions": sessions}
        fixtures["predict_request"] = predict_request
        fixtures["predict_response"] = route(state, "POST", "/predict", {},
                                             predict_request)

    for name, payload in fixtures.items():
        path = args.out_dir / f"{name}.json"
        path.write_text(json.dumps(payload, indent=1), encoding="utf-8")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
