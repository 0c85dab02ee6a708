"""CSV emitters and the scenario replay file.

Floats are written with 6 significant digits and LF line endings so that
identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from typing import Any, Iterable, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .config import ConfigError, SimConfig, from_document, to_document
from .geometry import GridSpec
from .simulator import RunSummary, SweepCell
from .world import Environment, ObstacleBox, Scenario, UavState, UserState

SCENARIO_SCHEMA_VERSION = 1

METRICS_HEADER = ("slot", "urllc_covered", "urllc_tput_bps", "embb_tput_bps", "sum_tput_bps", "displacement_m",
                  "fallback")
TRACE_HEADER = ("slot", "fallback", "zone_size", "zu_size", "S_z", "T_z_bps", "displacement_m")
SWEEP_HEADER = ("param", "value", "seed", "algorithm", "mean_urllc_tput", "mean_embb_tput", "mean_sum_tput",
                "mean_urllc_covered")

# simulator parameter -> name used in sweep CSVs and on the command line
SWEEP_LABELS = {"coverage_radius": "coverage_radius", "obstacle_count": "obstacles", "user_vmax": "velocity"}


def fmt(x: float) -> str:
    return format(float(x), ".6g")


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def metrics_csv(summary: RunSummary) -> str:
    return _csv(METRICS_HEADER, (
        (m.slot, m.urllc_covered_count, fmt(m.urllc_throughput), fmt(m.embb_throughput), fmt(m.sum_throughput),
         fmt(m.uav_displacement), m.fallback_level)
        for m in summary.slots
    ))


def trace_csv(summary: RunSummary) -> str:
    return _csv(TRACE_HEADER, (
        (m.slot, m.fallback_level, m.zone_size, m.zu_size, m.urllc_covered_count, fmt(m.planned_embb_throughput),
         fmt(m.uav_displacement))
        for m in summary.slots
    ))


def sweep_csv(cells: Sequence[SweepCell]) -> str:
    return _csv(SWEEP_HEADER, (
        (SWEEP_LABELS[c.parameter], fmt(c.value), c.seed, c.algorithm,
         fmt(c.summary.means["urllc_throughput"]), fmt(c.summary.means["embb_throughput"]),
         fmt(c.summary.means["sum_throughput"]), fmt(c.summary.means["urllc_covered_count"]))
        for c in cells
    ))


def _user_doc(u: UserState) -> dict[str, Any]:
    doc = {
        "id": u.id,
        "x": u.position[0],
        "y": u.position[1],
        "velocity": u.velocity,
        "heading": u.heading,
        "traffic_class": u.traffic_class,
        "rate_threshold": u.rate_threshold,
    }
    if u.waypoint is not None:
        doc["waypoint"] = list(u.waypoint)
    return doc


def _user_from(doc: dict[str, Any]) -> UserState:
    return UserState(
        id=doc["id"],
        position=(doc["x"], doc["y"]),
        velocity=doc["velocity"],
        heading=doc["heading"],
        traffic_class=doc["traffic_class"],
        rate_threshold=doc["rate_threshold"],
        waypoint=tuple(doc["waypoint"]) if "waypoint" in doc else None,
    )


def _checksum(payload: dict[str, Any]) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def scenario_document(cfg: SimConfig, scenario: Scenario, seed: int) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "schema_version": SCENARIO_SCHEMA_VERSION,
        "seed": int(seed),
        "config": to_document(cfg),
        "uav": {
            "x": scenario.uav.position[0],
            "y": scenario.uav.position[1],
            "altitude": scenario.uav.altitude,
            "velocity_max": scenario.uav.velocity_max,
            "coverage_radius": scenario.uav.coverage_radius,
            "capacity": scenario.uav.capacity,
        },
        "region": list(scenario.env.region),
        "cell_size": scenario.env.grid.cell_size,
        "obstacles": [{"min": list(o.min_corner), "max": list(o.max_corner)} for o in scenario.env.obstacles],
        "users": [_user_doc(u) for u in scenario.users],
        "excluded": [_user_doc(u) for u in scenario.excluded],
    }
    payload["checksum"] = _checksum(payload)
    return payload


def dumps_scenario(cfg: SimConfig, scenario: Scenario, seed: int) -> str:
    return tomli_w.dumps(scenario_document(cfg, scenario, seed))


def loads_scenario(text: str) -> tuple[SimConfig, Scenario, int]:
    """Parse a scenario file; raises :class:`ConfigError` on version or checksum mismatch."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid scenario file: {exc}") from None
    version = doc.get("schema_version")
    if version != SCENARIO_SCHEMA_VERSION:
        raise ConfigError(f"scenario schema_version {version!r} is not supported (expected {SCENARIO_SCHEMA_VERSION})")
    stated = doc.pop("checksum", None)
    if stated != _checksum(doc):
        raise ConfigError("scenario checksum mismatch; file was modified")
    try:
        cfg = from_document(doc["config"])
        env = Environment(
            tuple(doc["region"]),
            tuple(ObstacleBox(tuple(o["min"]), tuple(o["max"])) for o in doc["obstacles"]),
            GridSpec(doc["cell_size"]),
        )
        u = doc["uav"]
        uav = UavState((u["x"], u["y"]), u["altitude"], u["velocity_max"], u["coverage_radius"], u["capacity"])
        users = [_user_from(d) for d in doc["users"]]
        excluded = [_user_from(d) for d in doc["excluded"]]
        return cfg, Scenario(env, users, uav, excluded), int(doc["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed scenario file: {exc}") from None
