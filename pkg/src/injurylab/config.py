"""Global JSON configuration with strict unknown-key rejection."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .evaluation import GridSpec
from .ingest import PlausibilityConfig
from .features import ZoneConfig
from .models import MODEL_KINDS, default_config
from .store import DEFAULT_MATCH_ATTRIBUTES
from .windowing import WindowSpec


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PathsConfig:
    subjective_dir: str = "raw/subjective"
    gps_dir: str = "raw/gps"
    match_csv: str = "raw/match_stats.csv"
    injuries_csv: str = "raw/injuries.csv"
    roster_csv: str = "raw/roster.csv"
    store_path: str = "out/store.csv"
    windows_path: str = "out/windows.csv"
    rounds_dir: str = "out/rounds"
    results_dir: str = "out/results"
    models_dir: str = "out/models"


@dataclass(frozen=True)
class SynthesisConfig:
    event_proportion: float = 0.5
    multiplier: float = 1.0
    kind: str = "copula"  # "copula" | "jitter"

    def __post_init__(self):
        if self.kind not in ("copula", "jitter"):
            raise ConfigError(f"synthesis.kind must be copula or jitter, got {self.kind!r}")


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8712
    static_dir: str | None = None


@dataclass
class GlobalConfig:
    seed: int = 0
    paths: PathsConfig = field(default_factory=PathsConfig)
    plausibility: PlausibilityConfig = field(default_factory=PlausibilityConfig)
    zones: ZoneConfig = field(default_factory=ZoneConfig)
    load_model: str = "rolling"
    imputation: str = "median"
    window: WindowSpec = field(default_factory=WindowSpec)
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    grid: GridSpec = field(default_factory=GridSpec)
    models: dict = field(default_factory=dict)
    match_attributes: tuple = tuple(DEFAULT_MATCH_ATTRIBUTES)
    service: ServiceConfig = field(default_factory=ServiceConfig)

    def model_config(self, kind: str):
        overrides = self.models.get(kind, {})
        return default_config(kind, **overrides)


_TUPLE_FIELDS = {"features", "inputs", "outputs", "proportions", "models",
                 "match_attributes", "speed_bounds_kmh", "hr_bounds_pct"}


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    allowed = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        if key in _TUPLE_FIELDS and isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(data: dict) -> GlobalConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    allowed = {f.name for f in dataclasses.fields(GlobalConfig)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"config: unknown key(s) {sorted(unknown)}")

    sections = dict(data)
    kwargs = {}
    if "paths" in sections:
        kwargs["paths"] = _build(PathsConfig, sections.pop("paths"), "paths")
    if "plausibility" in sections:
        kwargs["plausibility"] = _build(
            PlausibilityConfig, sections.pop("plausibility"), "plausibility"
        )
    if "zones" in sections:
        zones = dict(sections.pop("zones"))
        allowed_zone = {"speed_bounds_kmh", "hr_bounds_pct", "max_hr_bpm"}
        unknown = set(zones) - allowed_zone
        if unknown:
            raise ConfigError(f"zones: unknown key(s) {sorted(unknown)}")
        if "speed_bounds_kmh" in zones:
            zones["speed_bounds_kmh"] = tuple(zones["speed_bounds_kmh"])
        if "hr_bounds_pct" in zones:
            zones["hr_bounds_pct"] = tuple(zones["hr_bounds_pct"])
        kwargs["zones"] = ZoneConfig(**zones)
    if "window" in sections:
        try:
            kwargs["window"] = _build(WindowSpec, sections.pop("window"), "window")
        except Exception as exc:
            raise ConfigError(f"window: {exc}") from None
    if "synthesis" in sections:
        kwargs["synthesis"] = _build(SynthesisConfig, sections.pop("synthesis"), "synthesis")
    if "grid" in sections:
        kwargs["grid"] = _build(GridSpec, sections.pop("grid"), "grid")
    if "service" in sections:
        kwargs["service"] = _build(ServiceConfig, sections.pop("service"), "service")
    if "models" in sections:
        models = sections.pop("models")
        if not isinstance(models, dict):
            raise ConfigError("models: expected an object of per-kind overrides")
        for kind, overrides in models.items():
            if kind not in MODEL_KINDS:
                raise ConfigError(f"models: unknown model kind {kind!r}")
            try:
                default_config(kind, **overrides)
            except TypeError as exc:
                raise ConfigError(f"models.{kind}: {exc}") from None
        kwargs["models"] = models
    if "match_attributes" in sections:
        kwargs["match_attributes"] = tuple(sections.pop("match_attributes"))
    for key in ("seed", "load_model", "imputation"):
        if key in sections:
            kwargs[key] = sections.pop(key)

    leftover = set(sections) - set(kwargs)
    if leftover:
        raise ConfigError(f"config: unknown key(s) {sorted(leftover)}")
    cfg = GlobalConfig(**kwargs)
    if cfg.load_model not in ("rolling", "ewma"):
        raise ConfigError(f"load_model must be rolling or ewma, got {cfg.load_model!r}")
    if cfg.imputation not in ("median", "linear", "iterative"):
        raise ConfigError(
            f"imputation must be median, linear or iterative, got {cfg.imputation!r}"
        )
    return cfg


def load_config(path: str | Path) -> GlobalConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data)


def config_snapshot(cfg: GlobalConfig) -> dict:
    def encode(value):
        if dataclasses.is_dataclass(value) and not isinstance(value, type):
            return {f.name: encode(getattr(value, f.name)) for f in dataclasses.fields(value)}
        if isinstance(value, tuple):
            return [encode(v) for v in value]
        if isinstance(value, dict):
            return {k: encode(v) for k, v in value.items()}
        return value

    return encode(cfg)
