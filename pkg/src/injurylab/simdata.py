"""Deterministic synthetic fixtures: a raw multi-source corpus and ready-made stores.

The original datasets are private; every test, demo, and acceptance run uses
data generated here from a fixed seed.
"""

from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

from .ingest import InjuryEvent, body_region_for
from .store import (
    DEFAULT_MATCH_ATTRIBUTES,
    DailyRecord,
    FeatureStore,
    default_catalog,
)

ROSTER_NAMES = [
    "Anna Berg",
    "Ida Larsen",
    "Maria Holm",
    "Sofie Dahl",
    "Nora Lund",
    "Emma Vik",
    "Julie Moen",
    "Thea Strand",
    "Linnea Foss",
    "Maja Eide",
]

INJURY_CAUSES = ["overuse", "contact", "twist", "fall"]
INJURY_ACTIVITIES = ["match", "training", "other"]
INJURY_AREAS = ["knee", "ankle", "hamstring", "thigh", "groin", "shoulder", "back", "foot"]

BASE_LAT = 59.95
BASE_LON = 10.75


def _session_dates(rng: np.random.Generator, n: int, start: dt.date) -> list[dt.date]:
    dates = [start]
    while len(dates) < n:
        gap = int(rng.choice([1, 1, 1, 2, 2, 3, 4], p=[0.3, 0.2, 0.1, 0.15, 0.1, 0.1, 0.05]))
        dates.append(dates[-1] + dt.timedelta(days=gap))
    return dates


def _typo(rng: np.random.Generator, name: str) -> str:
    """Perturb a name with at most two edits so linking stays under the cutoff."""
    kind = rng.integers(0, 4)
    chars = list(name)
    pos = int(rng.integers(0, len(chars)))
    if kind == 0:
        return name
    if kind == 1 and len(chars) > 3:
        del chars[pos]
    elif kind == 2:
        chars[pos] = chr(ord("a") + int(rng.integers(0, 26)))
    else:
        chars.insert(pos, chr(ord("a") + int(rng.integers(0, 26))))
    return "".join(chars)


def make_raw_corpus(
    root: str | Path,
    n_players: int = 8,
    sessions_per_player: int = 30,
    n_injuries: int = 12,
    seed: int = 2021,
    gps_rows_per_session: int = 120,
) -> dict:
    """Write a full raw corpus under `root`: subjective/, gps/, match_stats.csv,
    injuries.csv, roster.csv. Returns a summary of what was planted."""
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    root = Path(root)
    (root / "subjective").mkdir(parents=True, exist_ok=True)
    (root / "gps").mkdir(parents=True, exist_ok=True)

    players = [f"p{i + 1:02d}" for i in range(n_players)]
    names = ROSTER_NAMES[:n_players]
    with open(root / "roster.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["player_id", "name"])
        writer.writerows(zip(players, names))

    sessions: dict[str, list[dt.date]] = {}
    for player in players:
        offset = int(rng.integers(0, 4))
        sessions[player] = _session_dates(
            rng, sessions_per_player, dt.date(2021, 3, 1) + dt.timedelta(days=offset)
        )

    all_dates = sorted({d for dates in sessions.values() for d in dates})

    # subjective: one pivoted CSV per feature, ~88% cell presence
    feature_specs = {
        "rpe": lambda: int(rng.integers(2, 10)),
        "duration_min": lambda: int(rng.integers(45, 130)),
        "fatigue": lambda: int(rng.integers(1, 6)),
        "mood": lambda: int(rng.integers(1, 6)),
        "readiness": lambda: int(rng.integers(1, 6)),
        "soreness": lambda: int(rng.integers(1, 6)),
        "stress": lambda: int(rng.integers(1, 6)),
        "sleep_duration_h": lambda: round(float(rng.uniform(5.5, 9.5)), 1),
        "sleep_quality": lambda: int(rng.integers(1, 6)),
    }
    for feature, draw in feature_specs.items():
        with open(root / "subjective" / f"{feature}.csv", "w", newline="",
                  encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["date"] + players)
            for date in all_dates:
                row = [date.isoformat()]
                for player in players:
                    if date in sessions[player] and rng.random() < 0.88:
                        row.append(str(draw()))
                    else:
                        row.append("")
                writer.writerow(row)

    # GPS: one file per player-session, 1-2 Hz walk with a few implausible rows
    for player in players:
        for date in sessions[player]:
            path = root / "gps" / f"{player}_{date.isoformat()}_1.csv"
            start = dt.datetime(
                date.year, date.month, date.day, 10, 0, 0, tzinfo=dt.timezone.utc
            )
            lat, lon = BASE_LAT + rng.uniform(-0.001, 0.001), BASE_LON + rng.uniform(-0.001, 0.001)
            heading = rng.uniform(0, 2 * np.pi)
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(
                    ["timestamp", "lat", "lon", "speed_kmh", "heart_rate_bpm",
                     "satellites", "hdop"]
                )
                for k in range(gps_rows_per_session):
                    stamp = start + dt.timedelta(milliseconds=500 * k)
                    speed = float(np.clip(rng.normal(9.0, 5.0), 0.0, 38.0))
                    if rng.random() < 0.01:
                        speed = float(rng.uniform(45.0, 90.0))  # implausible spike
                    heading += rng.normal(0, 0.3)
                    step_m = speed / 3.6 * 0.5
                    lat += step_m * np.cos(heading) / 111_320.0
                    lon += step_m * np.sin(heading) / (111_320.0 * np.cos(np.radians(lat)))
                    writer.writerow([
                        stamp.strftime("%Y-%m-%dT%H:%M:%S.") + f"{stamp.microsecond // 1000:03d}Z",
                        f"{lat:.6f}",
                        f"{lon:.6f}",
                        f"{speed:.2f}",
                        str(int(rng.integers(110, 195))),
                        str(int(rng.integers(5, 21))),
                        f"{rng.uniform(0.4, 2.4):.2f}",
                    ])

    # match stats on roughly every fifth session of each player
    with open(root / "match_stats.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["player", "date"] + list(DEFAULT_MATCH_ATTRIBUTES))
        for player in players:
            for date in sessions[player][4::5]:
                row = [player, date.isoformat()]
                row += [str(int(rng.integers(0, 12))) for _ in DEFAULT_MATCH_ATTRIBUTES]
                writer.writerow(row)

    # injuries: two thirds on session dates, the rest on rest days
    planted = []
    with open(root / "injuries.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "date", "cause", "activity", "area"])
        for k in range(n_injuries):
            player_idx = k % n_players
            player = players[player_idx]
            dates = sessions[player]
            if k % 3 == 2:
                anchor = dates[int(rng.integers(3, len(dates) - 3))]
                date = anchor + dt.timedelta(days=1)
                while date in dates:
                    date += dt.timedelta(days=1)
            else:
                date = dates[int(rng.integers(3, len(dates) - 3))]
            area = INJURY_AREAS[int(rng.integers(0, len(INJURY_AREAS)))]
            writer.writerow([
                _typo(rng, names[player_idx]),
                date.isoformat(),
                INJURY_CAUSES[int(rng.integers(0, len(INJURY_CAUSES)))],
                INJURY_ACTIVITIES[int(rng.integers(0, len(INJURY_ACTIVITIES)))],
                area,
            ])
            planted.append({"player": player, "date": date.isoformat(), "area": area})

    return {
        "players": players,
        "sessions": {p: [d.isoformat() for d in ds] for p, ds in sessions.items()},
        "injuries": planted,
    }


def make_store_fixture(
    n_players: int = 8,
    total_sessions: int = 400,
    n_injuries: int = 12,
    seed: int = 77,
    match_attributes: tuple[str, ...] = (),
) -> FeatureStore:
    """An already-imputed feature store with planted injuries, for window tests."""
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    catalog = default_catalog(match_attributes=match_attributes)
    per_player = total_sessions // n_players
    players = [f"p{i + 1:02d}" for i in range(n_players)]
    numeric_names = catalog.numeric_names()

    records = []
    injuries: list[InjuryEvent] = []
    for pi, player in enumerate(players):
        start = dt.date(2021, 2, 1) + dt.timedelta(days=int(rng.integers(0, 6)))
        dates = [start]
        while len(dates) < per_player:
            # occasional long gaps so some candidate windows violate the 14-day spans
            gap = int(rng.choice([1, 2, 3, 4, 8, 16], p=[0.42, 0.24, 0.12, 0.1, 0.07, 0.05]))
            dates.append(dates[-1] + dt.timedelta(days=gap))

        injury_dates: set[dt.date] = set()
        base = n_injuries // n_players
        extra = 1 if pi < n_injuries % n_players else 0
        for k in range(base + extra):
            if rng.random() < 0.3:
                anchor = dates[int(rng.integers(2, per_player - 2))]
                date = anchor + dt.timedelta(days=1)
                while date in dates:
                    date += dt.timedelta(days=1)
                area = INJURY_AREAS[int(rng.integers(0, len(INJURY_AREAS)))]
                injuries.append(
                    InjuryEvent(
                        player=player, date=date, cause="overuse", activity="training",
                        area=area, body_region=body_region_for(area),
                    )
                )
            else:
                injury_dates.add(dates[int(rng.integers(2, per_player - 2))])

        for date in dates:
            injured = date in injury_dates
            area = INJURY_AREAS[int(rng.integers(0, len(INJURY_AREAS)))] if injured else None
            records.append(
                DailyRecord(
                    player=player,
                    date=date,
                    session_type="match" if rng.random() < 0.15 else "training",
                    numeric={
                        name: round(float(rng.uniform(0, 100)), 3)
                        for name in numeric_names
                    },
                    categorical={
                        "cause": "contact" if injured else "unknown",
                        "activity": "match" if injured else "unknown",
                        "area": area or "unknown",
                        "body_region": body_region_for(area) if area else "unknown",
                    },
                    injury=int(injured),
                )
            )
    records.sort(key=lambda r: (r.player, r.date))
    return FeatureStore(records=records, catalog=catalog, off_session_injuries=injuries)
