"""Command-line entry points for every pipeline stage plus the HTTP service.

Exit codes: 0 success, 1 stage failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, GlobalConfig, load_config
from .models import MODEL_KINDS
from .service import make_server


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to the global JSON config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="injurylab",
        description="Athlete monitoring and injury-risk prediction pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="raw sources -> fused, imputed feature store")
    _add_common(p)

    p = sub.add_parser("build-windows", help="feature store -> sliding-window samples")
    _add_common(p)

    p = sub.add_parser("synth", help="windows -> MCCV rounds with balanced training sets")
    _add_common(p)
    p.add_argument("--force", action="store_true", help="overwrite an existing rounds dir")
    p.add_argument("--rounds", type=int, default=None, help="override the round count")

    p = sub.add_parser("train", help="train one model on a materialized round")
    _add_common(p)
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--round", type=int, default=0, dest="round_index")

    p = sub.add_parser("evaluate", help="run all rounds for one model and aggregate")
    _add_common(p)
    p.add_argument("--model", required=True, choices=MODEL_KINDS)

    p = sub.add_parser("grid", help="run the full experiment grid")
    _add_common(p)
    p.add_argument("--force", action="store_true")
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--cells", default=None, help="comma-separated cell ids, e.g. I-1,I-7")

    p = sub.add_parser("serve", help="serve the store, results, and predictions over HTTP")
    _add_common(p)
    p.add_argument("--port", type=int, default=None)

    return parser


def _apply_overrides(cfg: GlobalConfig, args: argparse.Namespace) -> GlobalConfig:
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.window = dataclasses.replace(cfg.window, seed=args.seed)
        cfg.grid = dataclasses.replace(cfg.grid, seed=args.seed)
    rounds = getattr(args, "rounds", None)
    if rounds is not None:
        cfg.window = dataclasses.replace(cfg.window, rounds=rounds)
        cfg.grid = dataclasses.replace(cfg.grid, rounds=rounds)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "preprocess":
            info = pipeline.preprocess(cfg)
            print(
                f"preprocess: {info['records']} records, "
                f"retention {info['retention']['fraction']:.4f} -> {cfg.paths.store_path}"
            )
        elif args.command == "build-windows":
            info = pipeline.build_windows_stage(cfg)
            print(
                f"build-windows: {info['windows']} windows "
                f"({info['positives']} positive) -> {cfg.paths.windows_path}"
            )
        elif args.command == "synth":
            pipeline.synth_stage(cfg, force=args.force)
            print(f"synth: {cfg.window.rounds} rounds -> {cfg.paths.rounds_dir}")
        elif args.command == "train":
            path = pipeline.train_stage(cfg, args.model, args.round_index)
            print(f"train: saved {path}")
        elif args.command == "evaluate":
            summary = pipeline.evaluate_stage(cfg, args.model)
            means = ", ".join(f"{k}={v:.3f}" for k, v in summary["mean"].items())
            print(f"evaluate {args.model}: {means}")
        elif args.command == "grid":
            cells = args.cells.split(",") if args.cells else None
            outcome = pipeline.grid_stage(cfg, cells=cells, force=args.force)
            print(
                f"grid: {len(outcome.results)} cells ok, "
                f"{len(outcome.failures)} failed -> {cfg.paths.results_dir}"
            )
            if outcome.failures:
                for cell_id, message in outcome.failures.items():
                    print(f"  {cell_id}: {message}", file=sys.stderr)
                return 1
        elif args.command == "serve":
            port = args.port if args.port is not None else cfg.service.port
            results_path = Path(cfg.paths.results_dir) / "results.json"
            server = make_server(
                cfg.paths.store_path,
                results_path=results_path if results_path.exists() else None,
                models_dir=cfg.paths.models_dir,
                static_dir=cfg.service.static_dir,
                host=cfg.service.host,
                port=port,
            )
            host, bound_port = server.server_address[:2]
            print(f"serving on http://{host}:{bound_port} (ctrl-c to stop)")
            try:
                server.serve_forever()
            except KeyboardInterrupt:
                server.shutdown()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"{args.command} failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
