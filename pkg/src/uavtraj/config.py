"""Simulation configuration, its TOML document form, and seeded RNG substreams.

Every configurable value lives in :class:`SimConfig` and is addressable by a
dotted ``section.key`` name in the config document, e.g. ``uav.altitude``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .channel import RAYLEIGH, RICIAN, LinkParams, RadioConfig

ALGORITHMS = ("proposed", "baseline")
ZONE_MODES = ("exact", "enclosure")

_STREAMS = {"obstacles": 1, "users": 2, "uav": 3, "mobility": 4, "fading": 5}


def substream(seed: int, name: str, *index: int) -> np.random.Generator:
    """Independent generator for a named purpose (and optional per-entity index)."""
    return np.random.default_rng([int(seed), _STREAMS[name], *map(int, index)])


class ConfigError(ValueError):
    """Raised for malformed or out-of-range configuration."""


@dataclass(frozen=True)
class SimConfig:
    # [region]
    region_width: float = 400.0
    region_height: float = 400.0
    # [uav]
    uav_altitude: float = 40.0
    uav_vmax: float = 10.0
    coverage_radius: float = 46.0
    uav_capacity: int = 40
    # [users]
    users_total: int = 35
    urllc_fraction: float = 0.4
    user_vmax: float = 3.0
    urllc_threshold: float = 10e6
    baseline_embb_threshold: float = 10e6
    # [obstacles]
    obstacle_count: int = 20
    obstacle_side_min: float = 10.0
    obstacle_side_max: float = 30.0
    obstacle_height_min: float = 10.0
    obstacle_height_max: float = 60.0
    max_attempts: int = 1000
    # [radio]
    radio: RadioConfig = field(default_factory=RadioConfig)
    carrier_frequency: float = 73e9
    # [sim]
    slots: int = 100
    dt: float = 3.0
    cell_size: float = 1.0
    seed: int = 0
    algorithm: str = "proposed"
    deterministic_fading: bool = False
    zone_mode: str = "exact"

    def __post_init__(self):
        problems = []
        if self.region_width <= 0 or self.region_height <= 0:
            problems.append("region dimensions must be positive")
        if not 22.0 <= self.uav_altitude <= 150.0:
            problems.append(f"uav.altitude must lie in [22, 150] m, got {self.uav_altitude}")
        if self.uav_vmax <= 0:
            problems.append("uav.vmax must be positive")
        if self.coverage_radius <= 0:
            problems.append("uav.coverage_radius must be positive")
        if self.uav_capacity < 0:
            problems.append("uav.capacity must be non-negative")
        if self.users_total < 0:
            problems.append("users.count must be non-negative")
        if not 0.0 <= self.urllc_fraction <= 1.0:
            problems.append(f"users.urllc_fraction must lie in [0, 1], got {self.urllc_fraction}")
        if not 0.0 <= self.user_vmax <= self.uav_vmax:
            problems.append("users.vmax must lie in [0, uav.vmax]")
        if self.urllc_threshold <= 0 or self.baseline_embb_threshold <= 0:
            problems.append("rate thresholds must be positive")
        if self.obstacle_count < 0:
            problems.append("obstacles.count must be non-negative")
        if not 0 < self.obstacle_side_min <= self.obstacle_side_max:
            problems.append("need 0 < obstacles.side_min <= obstacles.side_max")
        if not 0 < self.obstacle_height_min <= self.obstacle_height_max:
            problems.append("need 0 < obstacles.height_min <= obstacles.height_max")
        if self.max_attempts < 1:
            problems.append("obstacles.max_attempts must be at least 1")
        if self.slots < 1:
            problems.append("sim.slots must be at least 1")
        if self.dt <= 0:
            problems.append("sim.dt must be positive")
        if self.cell_size <= 0:
            problems.append("sim.cell_size must be positive")
        if self.algorithm not in ALGORITHMS:
            problems.append(f"sim.algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.zone_mode not in ZONE_MODES:
            problems.append(f"sim.zone_mode must be one of {ZONE_MODES}, got {self.zone_mode!r}")
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def region(self) -> tuple[float, float, float, float]:
        return (0.0, 0.0, float(self.region_width), float(self.region_height))

    @property
    def urllc_count(self) -> int:
        # round half up
        return int(math.floor(self.users_total * self.urllc_fraction + 0.5))

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


# dotted key -> (SimConfig attribute or radio.<attr>, type)
_KEYS: dict[str, tuple[str, type]] = {
    "region.width": ("region_width", float),
    "region.height": ("region_height", float),
    "uav.altitude": ("uav_altitude", float),
    "uav.vmax": ("uav_vmax", float),
    "uav.coverage_radius": ("coverage_radius", float),
    "uav.capacity": ("uav_capacity", int),
    "users.count": ("users_total", int),
    "users.urllc_fraction": ("urllc_fraction", float),
    "users.vmax": ("user_vmax", float),
    "users.urllc_threshold_bps": ("urllc_threshold", float),
    "users.baseline_embb_threshold_bps": ("baseline_embb_threshold", float),
    "obstacles.count": ("obstacle_count", int),
    "obstacles.side_min": ("obstacle_side_min", float),
    "obstacles.side_max": ("obstacle_side_max", float),
    "obstacles.height_min": ("obstacle_height_min", float),
    "obstacles.height_max": ("obstacle_height_max", float),
    "obstacles.max_attempts": ("max_attempts", int),
    "radio.tx_power_dbm": ("radio.tx_power", float),
    "radio.tx_gain_dbi": ("radio.tx_gain", float),
    "radio.rx_gain_dbi": ("radio.rx_gain", float),
    "radio.bandwidth_hz": ("radio.bandwidth", float),
    "radio.noise_power_dbm": ("radio.noise_power", float),
    "radio.carrier_frequency_hz": ("carrier_frequency", float),
    "radio.los_alpha": ("radio.los.alpha", float),
    "radio.los_beta": ("radio.los.beta", float),
    "radio.los_sigma_db": ("radio.los.sigma", float),
    "radio.los_fading": ("radio.los.fading", str),
    "radio.los_k_factor": ("radio.los.k_factor", float),
    "radio.nlos_alpha": ("radio.nlos.alpha", float),
    "radio.nlos_beta": ("radio.nlos.beta", float),
    "radio.nlos_sigma_db": ("radio.nlos.sigma", float),
    "radio.nlos_fading": ("radio.nlos.fading", str),
    "radio.nlos_k_factor": ("radio.nlos.k_factor", float),
    "sim.slots": ("slots", int),
    "sim.dt": ("dt", float),
    "sim.cell_size": ("cell_size", float),
    "sim.seed": ("seed", int),
    "sim.algorithm": ("algorithm", str),
    "sim.deterministic_fading": ("deterministic_fading", bool),
    "sim.zone_mode": ("zone_mode", str),
}

CONFIG_KEYS = tuple(_KEYS)


def _coerce(key: str, value: Any, kind: type) -> Any:
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true/false, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if kind is int:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def get_key(cfg: SimConfig, key: str) -> Any:
    """Value of a dotted config key."""
    if key not in _KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    obj: Any = cfg
    for part in _KEYS[key][0].split("."):
        obj = getattr(obj, part)
    return obj


def to_document(cfg: SimConfig) -> dict[str, dict[str, Any]]:
    """Nested ``{section: {key: value}}`` form with every key present."""
    doc: dict[str, dict[str, Any]] = {}
    for key in _KEYS:
        section, name = key.split(".", 1)
        doc.setdefault(section, {})[name] = get_key(cfg, key)
    return doc


def from_document(doc: dict[str, Any], base: SimConfig | None = None) -> SimConfig:
    """Build a config from a (possibly partial) nested document; unknown keys are rejected."""
    flat: dict[str, Any] = {}
    for section, body in doc.items():
        if not isinstance(body, dict):
            raise ConfigError(f"top-level entry {section!r} must be a [section]")
        for name, value in body.items():
            key = f"{section}.{name}"
            if key not in _KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            flat[key] = _coerce(key, value, _KEYS[key][1])
    return with_overrides(base or SimConfig(), flat)


def with_overrides(cfg: SimConfig, values: dict[str, Any]) -> SimConfig:
    top: dict[str, Any] = {}
    radio: dict[str, Any] = {}
    links: dict[str, dict[str, Any]] = {"los": {}, "nlos": {}}
    for key, value in values.items():
        if key not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        value = _coerce(key, value, _KEYS[key][1])
        path = _KEYS[key][0].split(".")
        if len(path) == 1:
            top[path[0]] = value
        elif len(path) == 2:
            radio[path[1]] = value
        else:
            links[path[1]][path[2]] = value
    try:
        r = cfg.radio
        los = dataclasses.replace(r.los, **links["los"])
        nlos = dataclasses.replace(r.nlos, **links["nlos"])
        radio_cfg = dataclasses.replace(r, los=los, nlos=nlos, **radio)
        return dataclasses.replace(cfg, radio=radio_cfg, **top)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def dumps(cfg: SimConfig) -> str:
    return tomli_w.dumps(to_document(cfg))


def loads(text: str) -> SimConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    return from_document(doc)


def load(path) -> SimConfig:
    with open(path, "rb") as fh:
        raw = fh.read()
    return loads(raw.decode("utf-8"))


__all__ = [
    "ALGORITHMS",
    "CONFIG_KEYS",
    "ZONE_MODES",
    "ConfigError",
    "LinkParams",
    "RAYLEIGH",
    "RICIAN",
    "SimConfig",
    "dumps",
    "from_document",
    "get_key",
    "load",
    "loads",
    "substream",
    "to_document",
    "with_overrides",
]
