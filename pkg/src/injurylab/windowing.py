"""Sliding-window samples, stratified MCCV splits, and round materialization."""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .ingest import format_number
from .store import FeatureStore

VALID_GROUPS = ("TL", "W", "GPS", "MATCH")


class WindowError(ValueError):
    pass


@dataclass(frozen=True)
class WindowSpec:
    n_in: int = 5
    n_out: int = 3
    max_span_days: int = 14
    features: tuple[str, ...] = ("TL", "W", "GPS")
    test_fraction: float = 0.2
    rounds: int = 30
    seed: int = 0
    split_by: str = "window"  # "window" | "player"

    def __post_init__(self):
        if self.n_in < 1 or self.n_out < 1:
            raise WindowError("n_in and n_out must be >= 1")
        if not 0.0 < self.test_fraction < 1.0:
            raise WindowError("test_fraction must be in (0, 1)")
        if self.rounds < 1:
            raise WindowError("rounds must be >= 1")
        unknown = set(self.features) - set(VALID_GROUPS)
        if unknown:
            raise WindowError(f"unknown feature groups: {sorted(unknown)}")
        if self.split_by not in ("window", "player"):
            raise WindowError(f"split_by must be 'window' or 'player', got {self.split_by!r}")


@dataclass
class WindowSample:
    player: str
    anchor_date: dt.date | None
    x: np.ndarray
    label: int
    provenance: str = "real"


@dataclass
class WindowDataset:
    feature_names: list[str]  # flattened feature-major: f_1 .. f_n per base feature
    n_in: int
    samples: list[WindowSample]


def build_windows(store: FeatureStore, spec: WindowSpec) -> WindowDataset:
    """Emit one sample per admissible run of n_in consecutive sessions.

    A run is admissible iff its first-to-last span is within max_span_days and
    n_out further sessions exist with the last one within max_span_days of the
    anchor. The label is 1 iff any injury (session-day or off-session) falls in
    (anchor_date, last output date]. Features are flattened oldest-first,
    feature-major.
    """
    base_names = store.catalog.numeric_names(groups=spec.features)
    if not base_names:
        raise WindowError(f"no numeric features for groups {spec.features}")
    names = [f"{name}_{p}" for name in base_names for p in range(1, spec.n_in + 1)]

    samples: list[WindowSample] = []
    for player in store.players():
        rows = sorted(
            (r for r in store.records if r.player == player), key=lambda r: r.date
        )
        if len(rows) < spec.n_in + spec.n_out:
            continue
        injuries = store.injury_dates(player)
        for i in range(len(rows) - spec.n_in - spec.n_out + 1):
            window = rows[i: i + spec.n_in]
            if (window[-1].date - window[0].date).days > spec.max_span_days:
                continue
            out_run = rows[i + spec.n_in: i + spec.n_in + spec.n_out]
            anchor = window[-1].date
            out_end = out_run[-1].date
            if (out_end - anchor).days > spec.max_span_days:
                continue
            assert (window[-1].date - window[0].date).days <= spec.max_span_days
            assert (out_end - anchor).days <= spec.max_span_days
            label = int(any(anchor < d <= out_end for d in injuries))
            x = np.empty(len(names))
            k = 0
            for name in base_names:
                for record in window:
                    value = record.numeric.get(name)
                    if value is None:
                        raise WindowError(
                            f"missing value for {name} at {player}/{record.date}; "
                            "impute the store before building windows"
                        )
                    x[k] = value
                    k += 1
            samples.append(
                WindowSample(player=player, anchor_date=anchor, x=x, label=label)
            )
    return WindowDataset(feature_names=names, n_in=spec.n_in, samples=samples)


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------

def _round_rng(seed: int, round_index: int, *extra: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, round_index, *extra]))


def split(
    samples: Sequence[WindowSample], spec: WindowSpec, round_index: int
) -> tuple[list[WindowSample], list[WindowSample]]:
    """Random stratified split; only real samples are eligible for the test side.

    Deterministic in (spec.seed, round_index). The per-class test count is
    round(test_fraction * class size), clamped so both sides keep at least one
    sample of each class.
    """
    real = [i for i, s in enumerate(samples) if s.provenance == "real"]
    synthetic = [i for i, s in enumerate(samples) if s.provenance != "real"]
    by_class: dict[int, list[int]] = {0: [], 1: []}
    for i in real:
        by_class[samples[i].label].append(i)
    for label, members in by_class.items():
        if len(members) < 2:
            raise WindowError(
                f"class {label} has {len(members)} real sample(s); need at least 2"
            )

    if spec.split_by == "player":
        return _split_by_player(samples, spec, round_index, real, synthetic)

    rng = _round_rng(spec.seed, round_index)
    test_idx: set[int] = set()
    for label in (0, 1):  # fixed order keeps the rng stream stable
        members = by_class[label]
        n_test = int(round(spec.test_fraction * len(members)))
        n_test = min(max(n_test, 1), len(members) - 1)
        picked = rng.permutation(len(members))[:n_test]
        test_idx.update(members[j] for j in picked)

    train = [samples[i] for i in sorted(set(real) - test_idx)] + [
        samples[i] for i in synthetic
    ]
    test = [samples[i] for i in sorted(test_idx)]
    return train, test


def _split_by_player(samples, spec, round_index, real, synthetic):
    players = sorted({samples[i].player for i in real})
    rng = _round_rng(spec.seed, round_index)
    order = [players[j] for j in rng.permutation(len(players))]
    total = len(real)
    test_players: set[str] = set()
    covered = 0
    for player in order:
        if covered >= round(spec.test_fraction * total):
            break
        test_players.add(player)
        covered += sum(1 for i in real if samples[i].player == player)
    test = [samples[i] for i in real if samples[i].player in test_players]
    train = [samples[i] for i in real if samples[i].player not in test_players] + [
        samples[i] for i in synthetic
    ]
    for side, name in ((train, "train"), (test, "test")):
        labels = {s.label for s in side}
        for label in (0, 1):
            if label not in labels:
                raise WindowError(
                    f"player-level split left class {label} out of the {name} side"
                )
    return train, test


# ---------------------------------------------------------------------------
# round materialization
# ---------------------------------------------------------------------------

def write_windows_csv(path: Path, dataset: WindowDataset) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(dataset.feature_names + ["label", "provenance"])
        for sample in dataset.samples:
            row = [format_number(v) for v in sample.x]
            row.append(str(sample.label))
            row.append(sample.provenance)
            writer.writerow(row)


def read_windows_csv(path: Path, n_in: int) -> WindowDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[-2:] != ["label", "provenance"]:
            raise WindowError(f"{path}: expected trailing label,provenance columns")
        names = header[:-2]
        samples = []
        for row in reader:
            samples.append(
                WindowSample(
                    player="",
                    anchor_date=None,
                    x=np.array([float(v) for v in row[:-2]]),
                    label=int(row[-2]),
                    provenance=row[-1],
                )
            )
    return WindowDataset(feature_names=names, n_in=n_in, samples=samples)


def materialize_rounds(
    dataset: WindowDataset,
    spec: WindowSpec,
    out_dir: str | Path,
    balance_train=None,
    force: bool = False,
) -> dict:
    """Write round_<k>/train.csv and round_<k>/test.csv for k in 0..rounds-1.

    `balance_train(train_samples, round_index)` may return (augmented samples,
    info dict); synthetic augmentation is applied to train only. Refuses to
    write into an existing non-empty directory unless `force`.
    """
    out_dir = Path(out_dir)
    if out_dir.exists() and any(out_dir.iterdir()) and not force:
        raise WindowError(f"{out_dir} exists and is not empty (use force to overwrite)")
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest: dict = {
        "rounds": spec.rounds,
        "seed": spec.seed,
        "n_in": spec.n_in,
        "n_out": spec.n_out,
        "test_fraction": spec.test_fraction,
        "balance": [],
    }
    for k in range(spec.rounds):
        train, test = split(dataset.samples, spec, k)
        info = None
        if balance_train is not None:
            train, info = balance_train(train, k)
        round_dir = out_dir / f"round_{k}"
        round_dir.mkdir(exist_ok=True)
        write_windows_csv(
            round_dir / "train.csv",
            WindowDataset(dataset.feature_names, dataset.n_in, list(train)),
        )
        write_windows_csv(
            round_dir / "test.csv",
            WindowDataset(dataset.feature_names, dataset.n_in, list(test)),
        )
        manifest["balance"].append(info)
    with open(out_dir / "rounds_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
    return manifest
