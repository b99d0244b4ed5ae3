"""Per-session GPS aggregates and per-day training-load metrics."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .ingest import GpsSample

EARTH_RADIUS_M = 6_371_000.0
EPS = 1e-9

KMH_TO_MS = 1.0 / 3.6


class FeatureError(ValueError):
    pass


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters on a sphere of radius 6371 km."""
    phi1 = math.radians(lat1)
    phi2 = math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlambda = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlambda / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


# ---------------------------------------------------------------------------
# 1 Hz downsampling
# ---------------------------------------------------------------------------

def downsample_1hz(samples: Sequence[GpsSample]) -> list[GpsSample]:
    """Collapse sub-second samples to one sample per whole second.

    lat/lon/speed/heart rate become arithmetic means of that second's samples
    (heart rate over the present values only), the timestamp is truncated to
    the second, and seconds with no samples produce no output.
    """
    if not samples:
        return []
    out: list[GpsSample] = []
    group: list[GpsSample] = []
    group_second: int | None = None

    def flush() -> None:
        if not group:
            return
        first = group[0]
        heart_rates = [s.heart_rate_bpm for s in group if s.heart_rate_bpm is not None]
        sats = [s.satellites for s in group if s.satellites is not None]
        hdops = [s.hdop for s in group if s.hdop is not None]
        out.append(
            GpsSample(
                player=first.player,
                timestamp=dt.datetime.fromtimestamp(group_second, tz=dt.timezone.utc),
                lat=sum(s.lat for s in group) / len(group),
                lon=sum(s.lon for s in group) / len(group),
                speed_kmh=sum(s.speed_kmh for s in group) / len(group),
                heart_rate_bpm=sum(heart_rates) / len(heart_rates) if heart_rates else None,
                satellites=round(sum(sats) / len(sats)) if sats else None,
                hdop=sum(hdops) / len(hdops) if hdops else None,
                date=first.date,
                session=first.session,
            )
        )

    for sample in samples:
        second = int(sample.timestamp.timestamp() // 1)
        if group_second is None or second == group_second:
            group_second = second if group_second is None else group_second
            group.append(sample)
        else:
            flush()
            group = [sample]
            group_second = second
    flush()
    return out


# ---------------------------------------------------------------------------
# session aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZoneConfig:
    speed_bounds_kmh: tuple[float, ...] = (7.0, 14.0, 20.0, 25.0)
    hr_bounds_pct: tuple[float, ...] = (60.0, 70.0, 80.0, 90.0)
    max_hr_bpm: Mapping[str, float] = field(default_factory=dict)

    @property
    def n_zones(self) -> int:
        return len(self.speed_bounds_kmh) + 1


def zone_index(value: float, bounds: Sequence[float]) -> int:
    """1-based zone for `value` given ascending bounds; zones are [lo, hi)."""
    zone = 1
    for bound in bounds:
        if value >= bound:
            zone += 1
    return zone


@dataclass
class SessionAggregate:
    player: str
    date: dt.date
    duration_s: float
    total_distance_m: float
    speed_max_ms: float
    speed_mean_ms: float
    time_in_speed_zone: tuple[float, ...]
    time_in_hr_zone: tuple[float, ...]
    sample_count: int
    hr_zones_unavailable: bool = False

    def numeric_features(self) -> dict[str, float]:
        out = {
            "duration_s": self.duration_s,
            "total_distance_m": self.total_distance_m,
            "speed_max_ms": self.speed_max_ms,
            "speed_mean_ms": self.speed_mean_ms,
        }
        for i, value in enumerate(self.time_in_speed_zone, start=1):
            out[f"time_in_speed_zone_{i}"] = value
        for i, value in enumerate(self.time_in_hr_zone, start=1):
            out[f"time_in_hr_zone_{i}"] = value
        out["sample_count"] = float(self.sample_count)
        return out

    @staticmethod
    def feature_names(n_zones: int = 5) -> list[str]:
        names = ["duration_s", "total_distance_m", "speed_max_ms", "speed_mean_ms"]
        names += [f"time_in_speed_zone_{i}" for i in range(1, n_zones + 1)]
        names += [f"time_in_hr_zone_{i}" for i in range(1, n_zones + 1)]
        names.append("sample_count")
        return names


def aggregate_session(samples: Sequence[GpsSample], zones: ZoneConfig) -> SessionAggregate:
    """Aggregate one player-session of 1 Hz samples.

    Each sample adds one second to exactly one speed zone, and to one heart
    rate zone when heart rate and the player's max HR are both known. Distance
    is the sum of haversine steps between consecutive samples.
    """
    if not samples:
        raise FeatureError("cannot aggregate an empty session")
    player = samples[0].player
    n_zones = zones.n_zones
    speed_zone_s = [0.0] * n_zones
    hr_zone_s = [0.0] * n_zones
    max_hr = zones.max_hr_bpm.get(player)
    hr_unavailable = max_hr is None

    distance = 0.0
    for prev, cur in zip(samples, samples[1:]):
        distance += haversine_m(prev.lat, prev.lon, cur.lat, cur.lon)

    speeds_kmh = [s.speed_kmh for s in samples]
    for sample in samples:
        speed_zone_s[zone_index(sample.speed_kmh, zones.speed_bounds_kmh) - 1] += 1.0
        if max_hr is not None and sample.heart_rate_bpm is not None:
            pct = sample.heart_rate_bpm / max_hr * 100.0
            hr_zone_s[zone_index(pct, zones.hr_bounds_pct) - 1] += 1.0

    return SessionAggregate(
        player=player,
        date=samples[0].date or samples[0].timestamp.date(),
        duration_s=float(len(samples)),
        total_distance_m=distance,
        speed_max_ms=max(speeds_kmh) * KMH_TO_MS,
        speed_mean_ms=(sum(speeds_kmh) / len(speeds_kmh)) * KMH_TO_MS,
        time_in_speed_zone=tuple(speed_zone_s),
        time_in_hr_zone=tuple(hr_zone_s),
        sample_count=len(samples),
        hr_zones_unavailable=hr_unavailable,
    )


def merge_daily(aggregates: Sequence[SessionAggregate]) -> SessionAggregate:
    """Merge several same-day sessions of one player into a daily aggregate."""
    if not aggregates:
        raise FeatureError("nothing to merge")
    if len(aggregates) == 1:
        return aggregates[0]
    total_s = sum(a.duration_s for a in aggregates)
    mean_ms = sum(a.speed_mean_ms * a.duration_s for a in aggregates) / total_s if total_s else 0.0
    n_zones = len(aggregates[0].time_in_speed_zone)
    return SessionAggregate(
        player=aggregates[0].player,
        date=aggregates[0].date,
        duration_s=total_s,
        total_distance_m=sum(a.total_distance_m for a in aggregates),
        speed_max_ms=max(a.speed_max_ms for a in aggregates),
        speed_mean_ms=mean_ms,
        time_in_speed_zone=tuple(
            sum(a.time_in_speed_zone[i] for a in aggregates) for i in range(n_zones)
        ),
        time_in_hr_zone=tuple(
            sum(a.time_in_hr_zone[i] for a in aggregates) for i in range(n_zones)
        ),
        sample_count=sum(a.sample_count for a in aggregates),
        hr_zones_unavailable=any(a.hr_zones_unavailable for a in aggregates),
    )


# ---------------------------------------------------------------------------
# training load
# ---------------------------------------------------------------------------

def srpe(rpe: int | None, duration_min: float | None) -> float | None:
    """Session RPE: reported exertion times duration in minutes. Absent inputs propagate."""
    if rpe is None or duration_min is None:
        return None
    return float(rpe) * float(duration_min)


@dataclass
class TrainingLoadFeatures:
    player: str
    date: dt.date
    srpe: float
    daily_load: float
    weekly_load: float
    atl: float
    ctl28: float
    ctl42: float
    monotony: float
    strain: float
    acwr: float
    partial_history: bool = False

    FEATURE_NAMES = (
        "srpe",
        "daily_load",
        "weekly_load",
        "atl",
        "ctl28",
        "ctl42",
        "monotony",
        "strain",
        "acwr",
    )

    def numeric_features(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in self.FEATURE_NAMES}


def _ewma(values: np.ndarray, n: int) -> np.ndarray:
    lam = 2.0 / (n + 1.0)
    out = np.empty_like(values)
    acc = values[0]
    out[0] = acc
    for i in range(1, len(values)):
        acc = lam * values[i] + (1.0 - lam) * acc
        out[i] = acc
    return out


def derive_loads(
    daily: Mapping[dt.date, float],
    player: str,
    load_model: str = "rolling",
) -> list[TrainingLoadFeatures]:
    """Rolling training-load metrics over the calendar, one row per input date.

    Days absent from `daily` count as load 0 inside the rolling windows.
    Windows shorter than the nominal length at the start of the series use the
    available days only and are flagged via `partial_history`.
    """
    if load_model not in ("rolling", "ewma"):
        raise FeatureError(f"unknown load_model {load_model!r}")
    if not daily:
        return []
    dates = sorted(daily)
    start, end = dates[0], dates[-1]
    n_days = (end - start).days + 1
    loads = np.zeros(n_days)
    for date, value in daily.items():
        loads[(date - start).days] = value

    if load_model == "ewma":
        ewma7 = _ewma(loads, 7)
        ewma28 = _ewma(loads, 28)
        ewma42 = _ewma(loads, 42)

    out = []
    for date in dates:
        idx = (date - start).days
        week = loads[max(0, idx - 6): idx + 1]
        weekly = float(week.sum())
        mean7 = float(week.mean())
        std7 = float(week.std())  # population SD, sports-science convention
        monotony = mean7 / std7 if std7 >= EPS else 0.0
        strain = weekly * monotony
        if load_model == "rolling":
            atl = mean7
            ctl28 = float(loads[max(0, idx - 27): idx + 1].mean())
            ctl42 = float(loads[max(0, idx - 41): idx + 1].mean())
        else:
            atl = float(ewma7[idx])
            ctl28 = float(ewma28[idx])
            ctl42 = float(ewma42[idx])
        acwr = atl / ctl28 if ctl28 >= EPS else 0.0
        out.append(
            TrainingLoadFeatures(
                player=player,
                date=date,
                srpe=float(loads[idx]),
                daily_load=float(loads[idx]),
                weekly_load=weekly,
                atl=atl,
                ctl28=ctl28,
                ctl42=ctl42,
                monotony=monotony,
                strain=strain,
                acwr=acwr,
                partial_history=idx + 1 < 42,
            )
        )
    return out
