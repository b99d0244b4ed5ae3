#!/usr/bin/env python3
"""Run the whole pipeline on a fresh synthetic corpus with a reduced grid.

A desk-scale version of the full experiment: 2 input sizes x 2 output sizes
x 2 event proportions x 5 models x 3 MCCV rounds. Finishes in a few minutes.

Usage:
    python scripts/run_reduced_grid.py workdir/ [--seed 17] [--rounds 3]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from injurylab import pipeline
from injurylab.config import GlobalConfig, PathsConfig
from injurylab.evaluation import GridSpec
from injurylab.simdata import make_raw_corpus
from injurylab.windowing import WindowSpec


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("workdir", type=Path)
    parser.add_argument("--seed", type=int, default=17)
    parser.add_argument("--rounds", type=int, default=3)
    args = parser.parse_args()

    raw = args.workdir / "raw"
    out = args.workdir / "out"
    make_raw_corpus(raw, n_players=8, sessions_per_player=24, n_injuries=12,
                    seed=args.seed, gps_rows_per_session=60)

    cfg = GlobalConfig()
    cfg.seed = args.seed
    cfg.paths = PathsConfig(
        subjective_dir=str(raw / "subjective"),
        gps_dir=str(raw / "gps"),
        match_csv=str(raw / "match_stats.csv"),
        injuries_csv=str(raw / "injuries.csv"),
        roster_csv=str(raw / "roster.csv"),
        store_path=str(out / "store.csv"),
        windows_path=str(out / "windows.csv"),
        rounds_dir=str(out / "rounds"),
        results_dir=str(out / "results"),
        models_dir=str(out / "models"),
    )
    cfg.window = WindowSpec(n_in=3, n_out=1, rounds=args.rounds, seed=args.seed)
    cfg.grid = GridSpec(
        inputs=(3, 5), outputs=(1, 3), proportions=(0.25, 0.5),
        rounds=args.rounds, seed=args.seed,
    )

    started = time.monotonic()
    print("preprocess ...")
    pipeline.preprocess(cfg)
    print("build-windows ...")
    pipeline.build_windows_stage(cfg)
    print("synth ...")
    pipeline.synth_stage(cfg)
    print("grid (40 cells) ...")
    outcome = pipeline.grid_stage(cfg)
    elapsed = time.monotonic() - started

    print(f"\ndone in {elapsed:.1f}s: {len(outcome.results)} cells, "
          f"{len(outcome.failures)} failures")
    results_csv = out / "results" / "results.csv"
    print(f"results: {results_csv}\n")
    lines = results_csv.read_text().splitlines()
    print("\n".join(lines[:6]))
    if len(lines) > 6:
        print(f"... ({len(lines) - 6} more rows)")
    return 1 if outcome.failures else 0


if __name__ == "__main__":
    sys.exit(main())
