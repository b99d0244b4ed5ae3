"""The comprehensive per-(player, date) feature store: fusion, imputation, CSV persistence."""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .features import SessionAggregate, TrainingLoadFeatures, derive_loads, merge_daily, srpe
from .ingest import InjuryEvent, MatchStats, SubjectiveReport, format_number

KEY_COLUMNS = ("player", "date", "session_type")
TARGET_COLUMN = "injury"

WELLNESS_FEATURES = (
    "fatigue",
    "mood",
    "readiness",
    "soreness",
    "stress",
    "sleep_duration_h",
    "sleep_quality",
)

TL_FEATURES = ("rpe", "duration_min") + TrainingLoadFeatures.FEATURE_NAMES

INJURY_META = ("cause", "activity", "area", "body_region")

DEFAULT_MATCH_ATTRIBUTES = (
    "goals",
    "expected_goals",
    "assists",
    "expected_assists",
    "shots",
    "shots_on_target",
    "passes",
    "accurate_passes",
    "key_passes",
    "crosses",
    "accurate_crosses",
    "long_passes",
    "accurate_long_passes",
    "through_passes",
    "dribbles",
    "successful_dribbles",
    "duels",
    "duels_won",
    "aerial_duels",
    "aerial_duels_won",
    "tackles",
    "successful_tackles",
    "challenges",
    "challenges_won",
    "interceptions",
    "clearances",
    "blocks",
    "fouls_committed",
    "fouls_suffered",
    "offsides",
    "touches",
    "touches_in_box",
    "progressive_runs",
    "recoveries",
    "losses",
    "minutes_played",
    "yellow_cards",
    "red_cards",
)


class StoreError(ValueError):
    pass


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    group: str  # TL | W | GPS | MATCH | INJ
    kind: str  # numeric | categorical


@dataclass(frozen=True)
class FeatureCatalog:
    entries: tuple[CatalogEntry, ...]

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise StoreError(f"duplicate catalog names: {dupes}")
        for entry in self.entries:
            if entry.group not in ("TL", "W", "GPS", "MATCH", "INJ"):
                raise StoreError(f"unknown group {entry.group!r} for {entry.name}")
            if entry.kind not in ("numeric", "categorical"):
                raise StoreError(f"unknown kind {entry.kind!r} for {entry.name}")

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def numeric_names(self, groups: Sequence[str] | None = None) -> list[str]:
        return [
            e.name
            for e in self.entries
            if e.kind == "numeric" and (groups is None or e.group in groups)
        ]

    def categorical_names(self) -> list[str]:
        return [e.name for e in self.entries if e.kind == "categorical"]

    def kind_of(self, name: str) -> str:
        for entry in self.entries:
            if entry.name == name:
                return entry.kind
        raise StoreError(f"unknown feature {name!r}")

    def columns(self) -> list[str]:
        return list(KEY_COLUMNS) + self.names() + [TARGET_COLUMN]

    def to_json(self) -> list[dict]:
        return [{"name": e.name, "group": e.group, "kind": e.kind} for e in self.entries]

    @classmethod
    def from_json(cls, data: list[dict]) -> "FeatureCatalog":
        return cls(tuple(CatalogEntry(d["name"], d["group"], d["kind"]) for d in data))


def default_catalog(
    match_attributes: Sequence[str] = DEFAULT_MATCH_ATTRIBUTES,
    n_zones: int = 5,
) -> FeatureCatalog:
    entries = [CatalogEntry(name, "TL", "numeric") for name in TL_FEATURES]
    entries += [CatalogEntry(name, "W", "numeric") for name in WELLNESS_FEATURES]
    entries += [
        CatalogEntry(name, "GPS", "numeric")
        for name in SessionAggregate.feature_names(n_zones)
    ]
    entries += [CatalogEntry(name, "MATCH", "numeric") for name in match_attributes]
    entries += [CatalogEntry(name, "INJ", "categorical") for name in INJURY_META]
    return FeatureCatalog(tuple(entries))


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------

@dataclass
class DailyRecord:
    player: str
    date: dt.date
    session_type: str  # training | match
    numeric: dict[str, float | None]
    categorical: dict[str, str]
    injury: int

    def key(self) -> tuple[str, dt.date]:
        return (self.player, self.date)


@dataclass
class FeatureStore:
    records: list[DailyRecord]
    catalog: FeatureCatalog
    off_session_injuries: list[InjuryEvent] = field(default_factory=list)

    def players(self) -> list[str]:
        return sorted({r.player for r in self.records})

    def injury_dates(self, player: str) -> set[dt.date]:
        dates = {r.date for r in self.records if r.player == player and r.injury == 1}
        dates.update(e.date for e in self.off_session_injuries if e.player == player)
        return dates


# ---------------------------------------------------------------------------
# fusion
# ---------------------------------------------------------------------------

def fuse(
    subjective: Iterable[SubjectiveReport],
    gps_aggregates: Iterable[SessionAggregate],
    match_stats: Iterable[MatchStats],
    injuries: Iterable[InjuryEvent],
    catalog: FeatureCatalog | None = None,
    load_model: str = "rolling",
) -> FeatureStore:
    """Join the four sources on (player, date). GPS sessions define the rows.

    Subjective and match fields attach where present; the injury flag is set from
    events dated on a session day; injuries with no session row that day are kept
    in the store's off_session_injuries side table. Output is sorted by key and
    independent of input order.
    """
    catalog = catalog or default_catalog()
    subjective = list(subjective)
    match_stats = list(match_stats)
    injuries = list(injuries)

    by_day: dict[tuple[str, dt.date], list[SessionAggregate]] = {}
    for aggregate in gps_aggregates:
        by_day.setdefault((aggregate.player, aggregate.date), []).append(aggregate)
    sessions = {key: merge_daily(group) for key, group in by_day.items()}

    reports = {(r.player, r.date): r for r in subjective}
    matches: dict[tuple[str, dt.date], MatchStats] = {}
    for entry in match_stats:
        matches[(entry.player, entry.date)] = entry

    # per-player training-load series from the present sRPE values
    tl_rows: dict[tuple[str, dt.date], TrainingLoadFeatures] = {}
    for player in sorted({r.player for r in subjective}):
        daily = {}
        for report in subjective:
            if report.player != player:
                continue
            load = srpe(report.rpe, report.duration_min)
            if load is not None:
                daily[report.date] = load
        for row in derive_loads(daily, player, load_model=load_model):
            tl_rows[(player, row.date)] = row

    events_by_key: dict[tuple[str, dt.date], InjuryEvent] = {}
    for event in injuries:
        events_by_key.setdefault((event.player, event.date), event)

    records = []
    for key in sorted(sessions, key=lambda k: (k[0], k[1])):
        player, date = key
        aggregate = sessions[key]
        numeric: dict[str, float | None] = {name: None for name in catalog.numeric_names()}
        report = reports.get(key)
        if report is not None:
            for name in WELLNESS_FEATURES:
                value = getattr(report, name)
                numeric[name] = None if value is None else float(value)
            numeric["rpe"] = None if report.rpe is None else float(report.rpe)
            numeric["duration_min"] = (
                None if report.duration_min is None else float(report.duration_min)
            )
        tl = tl_rows.get(key)
        if tl is not None:
            numeric.update(tl.numeric_features())
        numeric.update(aggregate.numeric_features())
        match = matches.get(key)
        if match is not None:
            numeric.update(match.stats)

        event = events_by_key.get(key)
        categorical = {name: "unknown" for name in catalog.categorical_names()}
        if event is not None:
            categorical.update(
                cause=event.cause,
                activity=event.activity,
                area=event.area,
                body_region=event.body_region,
            )
        records.append(
            DailyRecord(
                player=player,
                date=date,
                session_type="match" if match is not None else "training",
                numeric=numeric,
                categorical=categorical,
                injury=1 if event is not None else 0,
            )
        )

    off_session = [e for key, e in sorted(events_by_key.items()) if key not in sessions]
    return FeatureStore(records=records, catalog=catalog, off_session_injuries=off_session)


# ---------------------------------------------------------------------------
# imputation
# ---------------------------------------------------------------------------

@dataclass
class ImputationReport:
    method: str
    filled: int = 0
    global_median_fallbacks: list[tuple[str, str]] = field(default_factory=list)


ITERATIVE_ROUNDS = 10


def impute(
    records: list[DailyRecord],
    method: str,
    catalog: FeatureCatalog | None = None,
) -> tuple[list[DailyRecord], ImputationReport]:
    """Fill numeric gaps per player and categorical gaps with 'unknown'.

    Methods: `median` (per-player per-feature median of present values),
    `linear` (interpolation between nearest present neighbors in date order,
    boundary gaps take the nearest present value), `iterative` (median init,
    then 10 rounds of least-squares regression of each originally-missing
    feature on all other numeric features). A feature with no present value
    for a player falls back to the global median and is flagged.
    Originally-present values are never altered.
    """
    if method not in ("median", "linear", "iterative"):
        raise StoreError(f"unknown imputation method {method!r}")
    catalog = catalog or default_catalog()
    names = catalog.numeric_names()
    report = ImputationReport(method=method)

    global_median: dict[str, float] = {}
    for name in names:
        present = [r.numeric[name] for r in records if r.numeric.get(name) is not None]
        global_median[name] = float(np.median(present)) if present else 0.0

    out: list[DailyRecord] = []
    players = sorted({r.player for r in records})
    for player in players:
        block = sorted(
            (r for r in records if r.player == player), key=lambda r: r.date
        )
        n = len(block)
        matrix = np.zeros((n, len(names)))
        missing = np.zeros((n, len(names)), dtype=bool)
        for i, record in enumerate(block):
            for j, name in enumerate(names):
                value = record.numeric.get(name)
                if value is None:
                    missing[i, j] = True
                else:
                    matrix[i, j] = value

        for j, name in enumerate(names):
            col_missing = missing[:, j]
            if not col_missing.any():
                continue
            present_values = matrix[~col_missing, j]
            if present_values.size == 0:
                matrix[col_missing, j] = global_median[name]
                report.global_median_fallbacks.append((player, name))
                report.filled += int(col_missing.sum())
                continue
            if method in ("median", "iterative"):
                matrix[col_missing, j] = float(np.median(present_values))
            else:  # linear, on date ordinals
                xs = np.array(
                    [block[i].date.toordinal() for i in range(n) if not col_missing[i]],
                    dtype=float,
                )
                targets = np.array(
                    [block[i].date.toordinal() for i in range(n) if col_missing[i]],
                    dtype=float,
                )
                # np.interp clamps outside the support, giving nearest-value boundaries
                matrix[col_missing, j] = np.interp(targets, xs, present_values)
            report.filled += int(col_missing.sum())

        if method == "iterative" and missing.any():
            refit_cols = [j for j in range(len(names)) if missing[:, j].any()]
            for _ in range(ITERATIVE_ROUNDS):
                for j in refit_cols:
                    others = [k for k in range(len(names)) if k != j]
                    design = np.column_stack([matrix[:, others], np.ones(n)])
                    coef, *_ = np.linalg.lstsq(design, matrix[:, j], rcond=None)
                    predicted = design[missing[:, j]] @ coef
                    matrix[missing[:, j], j] = predicted

        for i, record in enumerate(block):
            numeric = {name: float(matrix[i, j]) for j, name in enumerate(names)}
            categorical = {
                name: record.categorical.get(name) or "unknown"
                for name in catalog.categorical_names()
            }
            out.append(
                DailyRecord(
                    player=record.player,
                    date=record.date,
                    session_type=record.session_type,
                    numeric=numeric,
                    categorical=categorical,
                    injury=record.injury,
                )
            )
    out.sort(key=lambda r: (r.player, r.date))
    return out, report


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def write_store(store: FeatureStore, path: str | Path) -> None:
    """Write the store CSV (+ off_session_injuries.csv and catalog.json alongside)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    catalog = store.catalog
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(catalog.columns())
        for record in store.records:
            row = [record.player, record.date.isoformat(), record.session_type]
            for entry in catalog.entries:
                if entry.kind == "numeric":
                    value = record.numeric.get(entry.name)
                    row.append("" if value is None else format_number(value))
                else:
                    cell = record.categorical.get(entry.name, "unknown")
                    if cell == "":
                        raise StoreError(
                            f"categorical {entry.name} empty for {record.player}/{record.date}"
                        )
                    row.append(cell)
            row.append(str(record.injury))
            writer.writerow(row)

    side = path.parent / "off_session_injuries.csv"
    with open(side, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["player", "date", "cause", "activity", "area", "body_region"])
        for event in store.off_session_injuries:
            writer.writerow(
                [event.player, event.date.isoformat(), event.cause, event.activity,
                 event.area, event.body_region]
            )

    with open(path.parent / "catalog.json", "w", encoding="utf-8") as fh:
        json.dump(catalog.to_json(), fh, indent=1)


def read_store(path: str | Path, catalog: FeatureCatalog | None = None) -> FeatureStore:
    """Read a store CSV back; the on-disk column order must match the catalog exactly."""
    path = Path(path)
    if catalog is None:
        catalog_path = path.parent / "catalog.json"
        if not catalog_path.exists():
            raise StoreError(f"no catalog given and {catalog_path} not found")
        with open(catalog_path, encoding="utf-8") as fh:
            catalog = FeatureCatalog.from_json(json.load(fh))

    expected = catalog.columns()
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            for i, (got, want) in enumerate(zip(header or [], expected)):
                if got != want:
                    raise StoreError(
                        f"{path}: column {i} is {got!r}, expected {want!r}"
                    )
            raise StoreError(
                f"{path}: header has {len(header or [])} columns, expected {len(expected)}"
            )
        for row in reader:
            numeric: dict[str, float | None] = {}
            categorical: dict[str, str] = {}
            for value, entry in zip(row[3:], catalog.entries):
                if entry.kind == "numeric":
                    numeric[entry.name] = float(value) if value != "" else None
                else:
                    categorical[entry.name] = value
            records.append(
                DailyRecord(
                    player=row[0],
                    date=dt.date.fromisoformat(row[1]),
                    session_type=row[2],
                    numeric=numeric,
                    categorical=categorical,
                    injury=int(row[-1]),
                )
            )

    off_session = []
    side = path.parent / "off_session_injuries.csv"
    if side.exists():
        with open(side, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for entry in reader:
                off_session.append(
                    InjuryEvent(
                        player=entry["player"],
                        date=dt.date.fromisoformat(entry["date"]),
                        cause=entry["cause"],
                        activity=entry["activity"],
                        area=entry["area"],
                        body_region=entry["body_region"],
                    )
                )
    return FeatureStore(records=records, catalog=catalog, off_session_injuries=off_session)
