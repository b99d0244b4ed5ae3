import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from injurylab.features import (
    EARTH_RADIUS_M,
    ZoneConfig,
    aggregate_session,
    derive_loads,
    downsample_1hz,
    haversine_m,
    merge_daily,
    srpe,
    zone_index,
)
from injurylab.ingest import GpsSample

UTC = dt.timezone.utc
D = dt.date


def gps(ts_ms, lat=0.0, lon=0.0, speed=10.0, hr=None, player="p1"):
    return GpsSample(
        player=player,
        timestamp=dt.datetime(2021, 5, 1, 10, 0, 0, tzinfo=UTC)
        + dt.timedelta(milliseconds=ts_ms),
        lat=lat,
        lon=lon,
        speed_kmh=speed,
        heart_rate_bpm=hr,
        date=D(2021, 5, 1),
        session="1",
    )


# ---------------------------------------------------------------------------
# haversine
# ---------------------------------------------------------------------------

def test_haversine_identical_points():
    assert haversine_m(59.0, 10.0, 59.0, 10.0) == 0.0


def test_haversine_equator_arc_oracle():
    # R * dlambda at the equator
    expected = EARTH_RADIUS_M * math.radians(0.001)
    assert haversine_m(0.0, 0.0, 0.0, 0.001) == pytest.approx(expected, abs=0.01)
    assert expected == pytest.approx(111.19, abs=0.01)


def test_haversine_meridian_arc_oracle():
    # R * dphi along a meridian
    expected = EARTH_RADIUS_M * math.radians(0.0001)
    assert haversine_m(59.95, 10.75, 59.9501, 10.75) == pytest.approx(expected, abs=0.01)
    assert expected == pytest.approx(11.12, abs=0.01)


def test_haversine_symmetry():
    a = haversine_m(59.1, 10.2, 58.9, 11.0)
    b = haversine_m(58.9, 11.0, 59.1, 10.2)
    assert a == pytest.approx(b, rel=1e-12)


# ---------------------------------------------------------------------------
# downsampling
# ---------------------------------------------------------------------------

def test_downsample_means_within_second():
    samples = [gps(i * 100, speed=10.0 + i) for i in range(10)]  # speeds 10..19
    out = downsample_1hz(samples)
    assert len(out) == 1
    assert out[0].speed_kmh == pytest.approx(14.5)
    assert out[0].timestamp.microsecond == 0


def test_downsample_single_sample_truncates_timestamp():
    out = downsample_1hz([gps(250, speed=12.0)])
    assert len(out) == 1
    assert out[0].speed_kmh == 12.0
    assert out[0].timestamp == dt.datetime(2021, 5, 1, 10, 0, 0, tzinfo=UTC)


def test_downsample_does_not_invent_gap_seconds():
    samples = [gps(0), gps(2000)]
    out = downsample_1hz(samples)
    assert [s.timestamp.second for s in out] == [0, 2]


def test_downsample_empty():
    assert downsample_1hz([]) == []


def test_downsample_hr_mean_over_present_only():
    samples = [gps(0, hr=100.0), gps(200, hr=None), gps(400, hr=140.0)]
    out = downsample_1hz(samples)
    assert out[0].heart_rate_bpm == pytest.approx(120.0)


# ---------------------------------------------------------------------------
# session aggregation
# ---------------------------------------------------------------------------

def test_constant_speed_lands_in_zone_two():
    zones = ZoneConfig()
    samples = [gps(i * 1000, speed=10.0) for i in range(60)]
    aggregate = aggregate_session(samples, zones)
    assert aggregate.time_in_speed_zone == (0.0, 60.0, 0.0, 0.0, 0.0)
    assert aggregate.duration_s == 60.0


def test_stationary_distance_zero():
    zones = ZoneConfig()
    samples = [gps(i * 1000, lat=59.95, lon=10.75, speed=0.0) for i in range(10)]
    aggregate = aggregate_session(samples, zones)
    assert aggregate.total_distance_m == 0.0


def test_straight_line_walk_distance_oracle():
    # 1 m/s east along the equator for 100 s: synthesize lon from the arc length
    zones = ZoneConfig()
    step_deg = math.degrees(1.0 / EARTH_RADIUS_M)
    samples = [gps(i * 1000, lat=0.0, lon=i * step_deg, speed=3.6) for i in range(101)]
    aggregate = aggregate_session(samples, zones)
    assert aggregate.total_distance_m == pytest.approx(100.0, abs=0.5)
    # oracle recomputation: sum of consecutive haversine steps
    oracle = sum(
        haversine_m(samples[i].lat, samples[i].lon, samples[i + 1].lat, samples[i + 1].lon)
        for i in range(100)
    )
    assert aggregate.total_distance_m == pytest.approx(oracle, rel=1e-9)


def test_zone_occupancy_partitions_duration():
    rng = np.random.default_rng(3)
    zones = ZoneConfig()
    samples = [gps(i * 1000, speed=float(rng.uniform(0, 35))) for i in range(120)]
    aggregate = aggregate_session(samples, zones)
    assert sum(aggregate.time_in_speed_zone) == aggregate.duration_s


def test_speed_converted_to_si():
    zones = ZoneConfig()
    samples = [gps(0, speed=36.0), gps(1000, speed=18.0)]
    aggregate = aggregate_session(samples, zones)
    assert aggregate.speed_max_ms == pytest.approx(10.0)
    assert aggregate.speed_mean_ms == pytest.approx(7.5)


def test_hr_zones_with_configured_max():
    zones = ZoneConfig(max_hr_bpm={"p1": 200.0})
    # 130 bpm = 65% -> zone 2; 190 bpm = 95% -> zone 5
    samples = [gps(0, hr=130.0), gps(1000, hr=190.0)]
    aggregate = aggregate_session(samples, zones)
    assert aggregate.time_in_hr_zone == (0.0, 1.0, 0.0, 0.0, 1.0)
    assert not aggregate.hr_zones_unavailable


def test_hr_zones_unavailable_without_max():
    zones = ZoneConfig()
    samples = [gps(0, hr=130.0)]
    aggregate = aggregate_session(samples, zones)
    assert aggregate.time_in_hr_zone == (0.0,) * 5
    assert aggregate.hr_zones_unavailable


def test_single_sample_distance_zero_but_aggregate_produced():
    aggregate = aggregate_session([gps(0)], ZoneConfig())
    assert aggregate.total_distance_m == 0.0
    assert aggregate.duration_s == 1.0


def test_zone_index_boundaries_half_open():
    bounds = (7.0, 14.0, 20.0, 25.0)
    assert zone_index(6.999, bounds) == 1
    assert zone_index(7.0, bounds) == 2
    assert zone_index(25.0, bounds) == 5


def test_merge_daily_two_sessions():
    zones = ZoneConfig()
    first = aggregate_session([gps(i * 1000, speed=10.0) for i in range(30)], zones)
    second = aggregate_session([gps(i * 1000, speed=20.0) for i in range(60)], zones)
    merged = merge_daily([first, second])
    assert merged.duration_s == 90.0
    assert merged.time_in_speed_zone[1] == 30.0
    assert merged.time_in_speed_zone[3] == 60.0
    assert merged.speed_max_ms == second.speed_max_ms


# ---------------------------------------------------------------------------
# sRPE and rolling loads
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("rpe,minutes,expected", [(0, 90, 0.0), (7, 60, 420.0), (10, 0, 0.0)])
def test_srpe_product(rpe, minutes, expected):
    assert srpe(rpe, minutes) == expected


def test_srpe_absent_propagates():
    assert srpe(None, 60) is None
    assert srpe(7, None) is None


def test_constant_load_closed_form():
    start = D(2021, 3, 1)
    daily = {start + dt.timedelta(days=i): 100.0 for i in range(42)}
    rows = derive_loads(daily, "p1")
    last = rows[-1]
    assert last.weekly_load == 700.0
    assert last.atl == 100.0
    assert last.ctl28 == 100.0
    assert last.ctl42 == 100.0
    assert last.acwr == 1.0
    assert last.monotony == 0.0  # population SD of a constant window is 0
    assert last.strain == 0.0
    assert not last.partial_history


def test_single_session_with_zero_history():
    start = D(2021, 3, 1)
    daily = {start + dt.timedelta(days=i): 0.0 for i in range(6)}
    daily[start + dt.timedelta(days=6)] = 300.0
    rows = derive_loads(daily, "p1")
    last = rows[-1]
    assert last.weekly_load == 300.0
    assert last.atl == pytest.approx(300.0 / 7.0)
    # hand-computed monotony: mean/popstd of [0]*6+[300]
    window = np.array([0.0] * 6 + [300.0])
    assert last.monotony == pytest.approx(window.mean() / window.std())
    assert last.partial_history


def test_all_zero_loads():
    daily = {D(2021, 3, 1) + dt.timedelta(days=i): 0.0 for i in range(10)}
    for row in derive_loads(daily, "p1"):
        assert row.weekly_load == row.atl == row.ctl28 == row.acwr == 0.0
        assert row.monotony == row.strain == 0.0


def test_empty_series():
    assert derive_loads({}, "p1") == []


def test_gap_days_count_as_zero_load():
    # sessions on days 0 and 7; the week ending day 7 holds only that load
    daily = {D(2021, 3, 1): 700.0, D(2021, 3, 8): 70.0}
    rows = derive_loads(daily, "p1")
    assert rows[1].weekly_load == 70.0  # day 0 fell out of the 7-day window
    assert rows[1].atl == pytest.approx(10.0)


@given(st.floats(min_value=0.1, max_value=10.0), st.integers(min_value=0, max_value=400))
@settings(max_examples=50, deadline=None)
def test_scaling_and_shift_invariance(scale, shift_days):
    rng = np.random.default_rng(17)
    start = D(2021, 1, 1)
    daily = {}
    day = start
    for _ in range(20):
        daily[day] = float(rng.uniform(10, 500))
        day += dt.timedelta(days=int(rng.integers(1, 4)))

    base = derive_loads(daily, "p1")
    scaled = derive_loads({d: v * scale for d, v in daily.items()}, "p1")
    shifted = derive_loads(
        {d + dt.timedelta(days=shift_days): v for d, v in daily.items()}, "p1"
    )
    for b, s in zip(base, scaled):
        for name in ("srpe", "daily_load", "weekly_load", "atl", "ctl28", "ctl42", "strain"):
            assert getattr(s, name) == pytest.approx(getattr(b, name) * scale, rel=1e-9)
        assert s.acwr == pytest.approx(b.acwr, abs=1e-12)
        assert s.monotony == pytest.approx(b.monotony, abs=1e-12)
    for b, s in zip(base, shifted):
        assert s.date == b.date + dt.timedelta(days=shift_days)
        for name in ("weekly_load", "atl", "ctl28", "ctl42", "monotony", "strain", "acwr"):
            assert getattr(s, name) == pytest.approx(getattr(b, name), rel=1e-12)


def test_ewma_variant_constant_series():
    daily = {D(2021, 3, 1) + dt.timedelta(days=i): 100.0 for i in range(42)}
    rows = derive_loads(daily, "p1", load_model="ewma")
    last = rows[-1]
    assert last.atl == pytest.approx(100.0)
    assert last.ctl28 == pytest.approx(100.0)
    assert last.acwr == pytest.approx(1.0)


def test_ewma_matches_recursive_oracle():
    values = [100.0, 200.0, 50.0, 0.0, 300.0]
    daily = {D(2021, 3, 1) + dt.timedelta(days=i): v for i, v in enumerate(values)}
    rows = derive_loads(daily, "p1", load_model="ewma")
    lam = 2.0 / 8.0
    acc = values[0]
    for value, row in zip(values, rows):
        if row is rows[0]:
            assert row.atl == pytest.approx(acc)
            continue
        acc = lam * value + (1 - lam) * acc
        assert row.atl == pytest.approx(acc)
