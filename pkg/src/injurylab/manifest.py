"""Stage manifests: input hashes, config snapshot, versions, timings, cache hits."""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import platform
import time
from pathlib import Path

import numpy as np

from . import __version__


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def tree_sha256(path: str | Path) -> str:
    """Digest of a directory: sorted relative paths and their file digests."""
    path = Path(path)
    digest = hashlib.sha256()
    for member in sorted(p for p in path.rglob("*") if p.is_file()):
        digest.update(str(member.relative_to(path)).encode())
        digest.update(file_sha256(member).encode())
    return digest.hexdigest()


def hash_inputs(inputs: dict[str, Path]) -> dict[str, dict]:
    out = {}
    for name, path in inputs.items():
        path = Path(path)
        out[name] = {
            "path": str(path),
            "sha256": tree_sha256(path) if path.is_dir() else file_sha256(path),
        }
    return out


class StageTimer:
    def __init__(self):
        self.started = dt.datetime.now(dt.timezone.utc).isoformat()
        self._t0 = time.monotonic()

    @property
    def elapsed_s(self) -> float:
        return round(time.monotonic() - self._t0, 3)


def write_stage_manifest(
    out_dir: str | Path,
    command: str,
    inputs: dict[str, Path],
    config_snapshot: dict,
    timer: StageTimer,
    extra: dict | None = None,
) -> Path:
    """Write manifest_<command>.json next to the stage outputs.

    `cache_hit` is true when a previous manifest for the same command saw
    identical input hashes and config.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"manifest_{command}.json"

    hashed = hash_inputs(inputs)
    config_digest = hashlib.sha256(
        json.dumps(config_snapshot, sort_keys=True).encode()
    ).hexdigest()

    cache_hit = False
    if path.exists():
        try:
            with open(path, encoding="utf-8") as fh:
                previous = json.load(fh)
            prev_inputs = {k: v.get("sha256") for k, v in previous.get("inputs", {}).items()}
            new_inputs = {k: v["sha256"] for k, v in hashed.items()}
            cache_hit = (
                prev_inputs == new_inputs
                and previous.get("config_sha256") == config_digest
            )
        except (json.JSONDecodeError, OSError):
            cache_hit = False

    manifest = {
        "command": command,
        "inputs": hashed,
        "config_sha256": config_digest,
        "config": config_snapshot,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "injurylab": __version__,
        },
        "started": timer.started,
        "elapsed_s": timer.elapsed_s,
        "cache_hit": cache_hit,
    }
    if extra:
        manifest.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, default=str)
    return path
