#!/usr/bin/env python3
"""Generate a synthetic raw corpus plus a ready-to-run config.json.

Usage:
    python scripts/make_fixtures.py workdir/ [--players 8] [--sessions 30] [--seed 2021]

Afterwards:
    injurylab preprocess --config workdir/config.json
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from injurylab.config import GlobalConfig, PathsConfig, config_snapshot
from injurylab.simdata import make_raw_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("workdir", type=Path)
    parser.add_argument("--players", type=int, default=8)
    parser.add_argument("--sessions", type=int, default=30)
    parser.add_argument("--injuries", type=int, default=12)
    parser.add_argument("--seed", type=int, default=2021)
    args = parser.parse_args()

    raw = args.workdir / "raw"
    info = make_raw_corpus(
        raw,
        n_players=args.players,
        sessions_per_player=args.sessions,
        n_injuries=args.injuries,
        seed=args.seed,
    )
    cfg = GlobalConfig()
    cfg.seed = args.seed
    cfg.paths = PathsConfig(
        subjective_dir=str(raw / "subjective"),
        gps_dir=str(raw / "gps"),
        match_csv=str(raw / "match_stats.csv"),
        injuries_csv=str(raw / "injuries.csv"),
        roster_csv=str(raw / "roster.csv"),
        store_path=str(args.workdir / "out" / "store.csv"),
        windows_path=str(args.workdir / "out" / "windows.csv"),
        rounds_dir=str(args.workdir / "out" / "rounds"),
        results_dir=str(args.workdir / "out" / "results"),
        models_dir=str(args.workdir / "out" / "models"),
    )
    config_path = args.workdir / "config.json"
    config_path.write_text(json.dumps(config_snapshot(cfg), indent=1), encoding="utf-8")
    print(f"raw corpus for {len(info['players'])} players under {raw}")
    print(f"planted injuries: {len(info['injuries'])}")
    print(f"config written to {config_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
