"""Readers and validators for the four raw data sources.

Raw layout:
  subjective/   one CSV per feature; first column `date`, remaining columns player IDs
  gps/          one CSV per player-session, named `<player>_<date>_<session>.csv`
  match_stats.csv   one row per (player, match date) with the configured attribute catalog
  injuries.csv      free-text player names, linked to the roster by edit distance
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

log = logging.getLogger(__name__)


class IngestError(ValueError):
    """Malformed or inconsistent raw input."""


SUBJECTIVE_FEATURES = (
    "rpe",
    "duration_min",
    "fatigue",
    "mood",
    "readiness",
    "soreness",
    "stress",
    "sleep_duration_h",
    "sleep_quality",
)

# ordinal wellness scales are 1..5, rpe is 0..10
_ORDINAL_FEATURES = ("fatigue", "mood", "readiness", "soreness", "stress", "sleep_quality")

GPS_COLUMNS = ("timestamp", "lat", "lon", "speed_kmh", "heart_rate_bpm", "satellites", "hdop")

# area -> body region, after Page's four-region scheme (plus unknown)
AREA_TO_BODY_REGION = {
    "head": "head_neck",
    "face": "head_neck",
    "neck": "head_neck",
    "shoulder": "upper_limb",
    "upper_arm": "upper_limb",
    "arm": "upper_limb",
    "elbow": "upper_limb",
    "forearm": "upper_limb",
    "wrist": "upper_limb",
    "hand": "upper_limb",
    "finger": "upper_limb",
    "chest": "trunk",
    "ribs": "trunk",
    "back": "trunk",
    "lower_back": "trunk",
    "abdomen": "trunk",
    "pelvis": "trunk",
    "hip": "lower_limb",
    "groin": "lower_limb",
    "thigh": "lower_limb",
    "hamstring": "lower_limb",
    "quadriceps": "lower_limb",
    "knee": "lower_limb",
    "shin": "lower_limb",
    "lower_leg": "lower_limb",
    "calf": "lower_limb",
    "achilles": "lower_limb",
    "ankle": "lower_limb",
    "foot": "lower_limb",
    "toe": "lower_limb",
}


def body_region_for(area: str) -> str:
    return AREA_TO_BODY_REGION.get(area.strip().lower(), "unknown")


# ---------------------------------------------------------------------------
# domain records
# ---------------------------------------------------------------------------

@dataclass
class GpsSample:
    player: str
    timestamp: dt.datetime
    lat: float
    lon: float
    speed_kmh: float
    heart_rate_bpm: float | None = None
    satellites: int | None = None
    hdop: float | None = None
    # session key parsed from the file name; groups samples of one player-session
    date: dt.date | None = None
    session: str = ""


@dataclass
class SubjectiveReport:
    player: str
    date: dt.date
    rpe: int | None = None
    duration_min: float | None = None
    fatigue: int | None = None
    mood: int | None = None
    readiness: int | None = None
    soreness: int | None = None
    stress: int | None = None
    sleep_duration_h: float | None = None
    sleep_quality: int | None = None


@dataclass
class MatchStats:
    player: str
    date: dt.date
    stats: dict[str, float]


@dataclass(frozen=True)
class InjuryEvent:
    player: str
    date: dt.date
    cause: str
    activity: str
    area: str
    body_region: str


@dataclass
class RawInjuryRow:
    name: str
    date: dt.date
    cause: str
    activity: str
    area: str


@dataclass
class UnmatchedInjury:
    row: RawInjuryRow
    candidates: list[tuple[str, str, int]]  # (player_id, canonical name, distance)
    reason: str  # "tie" | "over_cutoff"


@dataclass
class InjuryLinkResult:
    events: list[InjuryEvent]
    unmatched: list[UnmatchedInjury]


# ---------------------------------------------------------------------------
# subjective reports
# ---------------------------------------------------------------------------

def _parse_date(text: str, where: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise IngestError(f"{where}: malformed date {text!r}") from None


def _parse_subjective_value(feature: str, text: str, where: str) -> float | int:
    try:
        value = float(text)
    except ValueError:
        raise IngestError(f"{where}: non-numeric value {text!r} for {feature}") from None
    if feature == "rpe":
        if value != int(value) or not 0 <= value <= 10:
            raise IngestError(f"{where}: rpe must be an integer in [0, 10], got {text!r}")
        return int(value)
    if feature in _ORDINAL_FEATURES:
        if value != int(value) or not 1 <= value <= 5:
            raise IngestError(f"{where}: {feature} must be an integer in [1, 5], got {text!r}")
        return int(value)
    if value < 0:
        raise IngestError(f"{where}: {feature} must be >= 0, got {text!r}")
    return value


def read_subjective(directory: str | Path) -> list[SubjectiveReport]:
    """Read the per-feature pivoted CSVs and merge them into one report per (player, date).

    Missing cells stay absent (None), never zero. A duplicate (player, date, feature)
    cell is a hard error.
    """
    directory = Path(directory)
    cells: dict[tuple[str, dt.date], dict[str, float | int]] = {}
    seen: set[tuple[str, dt.date, str]] = set()
    for path in sorted(directory.glob("*.csv")):
        feature = path.stem
        if feature not in SUBJECTIVE_FEATURES:
            raise IngestError(f"{path}: unknown subjective feature file {feature!r}")
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[0] != "date":
                raise IngestError(f"{path}: first column must be 'date'")
            players = header[1:]
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                date = _parse_date(row[0], f"{path}:{lineno}")
                for player, cell in zip(players, row[1:]):
                    if cell.strip() == "":
                        continue
                    key = (player, date, feature)
                    if key in seen:
                        raise IngestError(
                            f"{path}:{lineno}: duplicate value for "
                            f"(player={player}, date={date}, feature={feature})"
                        )
                    seen.add(key)
                    value = _parse_subjective_value(feature, cell, f"{path}:{lineno}")
                    cells.setdefault((player, date), {})[feature] = value
    reports = [
        SubjectiveReport(player=player, date=date, **values)
        for (player, date), values in sorted(cells.items())
    ]
    return reports


def write_subjective(reports: Iterable[SubjectiveReport], directory: str | Path) -> None:
    """Inverse of read_subjective: one pivoted CSV per feature, players as columns."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    reports = list(reports)
    players = sorted({r.player for r in reports})
    dates = sorted({r.date for r in reports})
    by_key = {(r.player, r.date): r for r in reports}
    for feature in SUBJECTIVE_FEATURES:
        rows = []
        for date in dates:
            row = [date.isoformat()]
            for player in players:
                report = by_key.get((player, date))
                value = getattr(report, feature) if report else None
                row.append("" if value is None else format_number(value))
            rows.append(row)
        with open(directory / f"{feature}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["date"] + players)
            writer.writerows(rows)


def format_number(value: float | int) -> str:
    """Minimal, round-trip-exact text for a numeric cell."""
    value = float(value)
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


# ---------------------------------------------------------------------------
# GPS telemetry
# ---------------------------------------------------------------------------

@dataclass
class GpsReadStats:
    files: int = 0
    rows: int = 0
    skipped: int = 0
    skipped_by_file: dict[str, int] = field(default_factory=dict)


def _parse_timestamp(text: str) -> dt.datetime:
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1]
    stamp = dt.datetime.fromisoformat(text)
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=dt.timezone.utc)
    return stamp.astimezone(dt.timezone.utc)


def _session_key_from_name(path: Path) -> tuple[str, dt.date, str]:
    parts = path.stem.split("_")
    if len(parts) < 3:
        raise IngestError(f"{path}: expected file name <player>_<date>_<session>.csv")
    session = parts[-1]
    date = _parse_date(parts[-2], str(path))
    player = "_".join(parts[:-2])
    if not player:
        raise IngestError(f"{path}: empty player id in file name")
    return player, date, session


def read_gps(directory: str | Path, stats: GpsReadStats | None = None) -> Iterator[GpsSample]:
    """Stream samples from per-session CSVs, one file at a time.

    Unparsable rows are skipped with a warning and counted in `stats`; a wrong
    header is a hard error. Files are visited in sorted-name order and samples
    keep file order.
    """
    directory = Path(directory)
    for path in sorted(directory.glob("*.csv")):
        player, date, session = _session_key_from_name(path)
        if stats is not None:
            stats.files += 1
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != GPS_COLUMNS:
                raise IngestError(
                    f"{path}: header must be {','.join(GPS_COLUMNS)}, got {header!r}"
                )
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if stats is not None:
                    stats.rows += 1
                try:
                    sample = GpsSample(
                        player=player,
                        timestamp=_parse_timestamp(row[0]),
                        lat=float(row[1]),
                        lon=float(row[2]),
                        speed_kmh=float(row[3]),
                        heart_rate_bpm=float(row[4]) if row[4].strip() else None,
                        satellites=int(row[5]) if row[5].strip() else None,
                        hdop=float(row[6]) if row[6].strip() else None,
                        date=date,
                        session=session,
                    )
                except (ValueError, IndexError):
                    log.warning("%s:%d: skipping unparsable GPS row", path, lineno)
                    if stats is not None:
                        stats.skipped += 1
                        stats.skipped_by_file[path.name] = (
                            stats.skipped_by_file.get(path.name, 0) + 1
                        )
                    continue
                yield sample


# ---------------------------------------------------------------------------
# plausibility filtering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlausibilityConfig:
    lat_min: float = -90.0
    lat_max: float = 90.0
    lon_min: float = -180.0
    lon_max: float = 180.0
    speed_max_kmh: float | None = 40.0
    min_satellites: int | None = 4
    max_hdop: float | None = 5.0


@dataclass
class RetentionStats:
    total: int = 0
    kept: int = 0
    drops: dict[str, int] = field(default_factory=dict)
    empty_input: bool = False

    @property
    def retention(self) -> float:
        if self.total == 0:
            return 1.0
        return self.kept / self.total

    def merge(self, other: "RetentionStats") -> "RetentionStats":
        merged = RetentionStats(
            total=self.total + other.total,
            kept=self.kept + other.kept,
            drops=dict(self.drops),
            empty_input=self.empty_input and other.empty_input,
        )
        for rule, count in other.drops.items():
            merged.drops[rule] = merged.drops.get(rule, 0) + count
        return merged


def _violated_rules(sample: GpsSample, cfg: PlausibilityConfig) -> list[str]:
    rules = []
    if not cfg.lat_min <= sample.lat <= cfg.lat_max:
        rules.append("lat_range")
    if not cfg.lon_min <= sample.lon <= cfg.lon_max:
        rules.append("lon_range")
    if sample.speed_kmh < 0 or (
        cfg.speed_max_kmh is not None and sample.speed_kmh > cfg.speed_max_kmh
    ):
        rules.append("speed_range")
    if (
        cfg.min_satellites is not None
        and sample.satellites is not None
        and sample.satellites < cfg.min_satellites
    ):
        rules.append("min_satellites")
    if cfg.max_hdop is not None and sample.hdop is not None and sample.hdop > cfg.max_hdop:
        rules.append("max_hdop")
    return rules


def filter_plausible(
    samples: Iterable[GpsSample], cfg: PlausibilityConfig
) -> tuple[Iterator[GpsSample], RetentionStats]:
    """Drop samples violating any enabled bound.

    Returns the filtered stream plus a stats object that is complete once the
    stream has been consumed. Stats merging is associative and commutative so
    per-file partials can be combined in any order. Filtering never fails;
    empty input reports retention 1.0 with `empty_input` set.
    """
    stats = RetentionStats(empty_input=True)

    def generate() -> Iterator[GpsSample]:
        for sample in samples:
            stats.empty_input = False
            stats.total += 1
            rules = _violated_rules(sample, cfg)
            if rules:
                for rule in rules:
                    stats.drops[rule] = stats.drops.get(rule, 0) + 1
            else:
                stats.kept += 1
                yield sample

    return generate(), stats


# ---------------------------------------------------------------------------
# injury linking
# ---------------------------------------------------------------------------

def levenshtein(a: str, b: str) -> int:
    """Minimal insert/delete/substitute count, unit costs."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,  # delete from a
                    current[j - 1] + 1,  # insert into a
                    previous[j - 1] + (ca != cb),  # substitute
                )
            )
        previous = current
    return previous[-1]


def link_injuries(
    rows: Iterable[RawInjuryRow], roster: Iterable[tuple[str, str]]
) -> InjuryLinkResult:
    """Assign each raw injury row to the roster entry with minimal edit distance.

    A match is accepted only if the distance is at most ceil(0.3 * len(canonical name));
    ties between roster entries are never resolved silently and go to the unmatched list
    with both candidates recorded.
    """
    roster = list(roster)
    if not roster:
        raise IngestError("empty roster")
    events: list[InjuryEvent] = []
    unmatched: list[UnmatchedInjury] = []
    for row in rows:
        scored = [(pid, name, levenshtein(row.name, name)) for pid, name in roster]
        best = min(d for _, _, d in scored)
        candidates = [entry for entry in scored if entry[2] == best]
        if len(candidates) > 1:
            unmatched.append(UnmatchedInjury(row=row, candidates=candidates, reason="tie"))
            continue
        pid, name, distance = candidates[0]
        if distance > math.ceil(0.3 * len(name)):
            unmatched.append(
                UnmatchedInjury(row=row, candidates=candidates, reason="over_cutoff")
            )
            continue
        events.append(
            InjuryEvent(
                player=pid,
                date=row.date,
                cause=row.cause or "unknown",
                activity=row.activity or "unknown",
                area=row.area or "unknown",
                body_region=body_region_for(row.area),
            )
        )
    return InjuryLinkResult(events=events, unmatched=unmatched)


def read_injury_rows(path: str | Path) -> list[RawInjuryRow]:
    """Read the medical staff's injury report CSV (name,date,cause,activity,area)."""
    path = Path(path)
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"name", "date", "cause", "activity", "area"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise IngestError(f"{path}: header must contain {sorted(required)}")
        for lineno, record in enumerate(reader, start=2):
            rows.append(
                RawInjuryRow(
                    name=record["name"].strip(),
                    date=_parse_date(record["date"], f"{path}:{lineno}"),
                    cause=record["cause"].strip(),
                    activity=record["activity"].strip(),
                    area=record["area"].strip(),
                )
            )
    return rows


def read_roster(path: str | Path) -> list[tuple[str, str]]:
    """Read the roster CSV (player_id,name) mapping canonical names to IDs."""
    path = Path(path)
    roster = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"player_id", "name"}.issubset(reader.fieldnames):
            raise IngestError(f"{path}: header must contain player_id,name")
        for record in reader:
            roster.append((record["player_id"].strip(), record["name"].strip()))
    return roster


# ---------------------------------------------------------------------------
# match statistics
# ---------------------------------------------------------------------------

def read_match_stats(path: str | Path, attributes: Iterable[str]) -> list[MatchStats]:
    """Read per-(player, date) match statistics with exactly the configured attributes."""
    path = Path(path)
    attributes = list(attributes)
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["player", "date"] + attributes
        if header != expected:
            raise IngestError(
                f"{path}: header must be exactly the configured attribute catalog "
                f"(player,date,{','.join(attributes)})"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            date = _parse_date(row[1], f"{path}:{lineno}")
            stats: dict[str, float] = {}
            for name, cell in zip(attributes, row[2:]):
                try:
                    value = float(cell)
                except ValueError:
                    raise IngestError(
                        f"{path}:{lineno}: non-numeric value {cell!r} for {name}"
                    ) from None
                stats[name] = value
            entries.append(MatchStats(player=row[0], date=date, stats=stats))
    return entries
