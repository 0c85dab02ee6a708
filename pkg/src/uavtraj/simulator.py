"""Discrete-time simulation: per-slot planning, motion and realised throughput."""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import link_rate
from .config import SimConfig, substream
from .planner import PlanOutcome, plan, plan_baseline
from .world import Environment, Scenario, UavState, UserState, generate_scenario, has_los, step_users

SWEEP_PARAMS = {
    "coverage_radius": "coverage_radius",
    "obstacle_count": "obstacle_count",
    "user_vmax": "user_vmax",
}

_NUMERIC = ("urllc_covered_count", "urllc_throughput", "embb_throughput", "sum_throughput", "uav_displacement")


@dataclass(frozen=True)
class SlotMetrics:
    slot: int
    urllc_covered_count: int
    urllc_throughput: float
    embb_throughput: float
    sum_throughput: float
    uav_displacement: float
    fallback_level: str
    coverage_violations: int = 0
    urllc_users: int = 0
    zone_size: int = 0
    zu_size: int = 0
    planned_embb_throughput: float = 0.0


@dataclass
class SimState:
    env: Environment
    users: list[UserState]
    uav: UavState
    mobility: list[np.random.Generator]
    fading: np.random.Generator | None
    slot: int = 0


@dataclass
class RunSummary:
    config: SimConfig
    seed: int
    slots: list[SlotMetrics]
    excluded_users: int = 0
    means: dict[str, float] = field(default_factory=dict)
    stds: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.means:
            self.means, self.stds = _stats(self.slots)

    @property
    def coverage_violations(self) -> int:
        return sum(m.coverage_violations for m in self.slots)

    @property
    def urllc_user_slots(self) -> int:
        return sum(m.urllc_users for m in self.slots)


def _stats(slots: Sequence[SlotMetrics]) -> tuple[dict[str, float], dict[str, float]]:
    means, stds = {}, {}
    for name in _NUMERIC:
        values = np.array([getattr(m, name) for m in slots], dtype=float)
        means[name] = float(values.mean()) if len(values) else 0.0
        stds[name] = float(values.std()) if len(values) else 0.0
    return means, stds


def initial_state(cfg: SimConfig, scenario: Scenario, seed: int | None = None) -> SimState:
    seed = cfg.seed if seed is None else seed
    # keyed by list position, not id, so relabelling users leaves results unchanged
    mobility = [substream(seed, "mobility", k) for k in range(len(scenario.users))]
    fading = None if cfg.deterministic_fading else substream(seed, "fading")
    return SimState(scenario.env, list(scenario.users), scenario.uav, mobility, fading)


def _plan(state: SimState, cfg: SimConfig) -> PlanOutcome:
    if cfg.algorithm == "baseline":
        return plan_baseline(state.users, state.uav, state.env, cfg.radio, cfg.dt, cfg.baseline_embb_threshold,
                             cfg.zone_mode)
    urllc = [u for u in state.users if u.is_urllc]
    embb = [u for u in state.users if not u.is_urllc]
    return plan(urllc, embb, state.uav, state.env, cfg.radio, cfg.dt, cfg.zone_mode)


def run_slot(state: SimState, cfg: SimConfig) -> tuple[SimState, SlotMetrics]:
    """Plan from the slot-start snapshot, move users and UAV, then measure.

    URLLC users count only if covered at planning time and, at their end-of-slot
    position, still in LoS (otherwise they score zero and a coverage violation is
    recorded). eMBB users inside the coverage disk score their LoS or NLoS rate.
    """
    outcome = _plan(state, cfg)
    users = step_users(state.users, state.env, cfg.dt, state.mobility, cfg.max_attempts)
    uav = dataclasses.replace(state.uav, position=outcome.chosen_cell)
    z = outcome.chosen_cell
    top = (z[0], z[1], uav.altitude)
    covered = set(outcome.covered_ids)
    urllc_tput = 0.0
    embb_tput = 0.0
    violations = 0
    n_urllc = 0
    for u in users:
        ground = (u.position[0], u.position[1], 0.0)
        if u.is_urllc:
            n_urllc += 1
            if u.id not in covered:
                continue
            if has_los(top, ground, state.env):
                urllc_tput += link_rate(top, ground, True, cfg.radio, state.fading)
            else:
                violations += 1
        elif math.dist(z, u.position) <= uav.coverage_radius:
            los = has_los(top, ground, state.env)
            embb_tput += link_rate(top, ground, los, cfg.radio, state.fading)
    metrics = SlotMetrics(
        slot=state.slot,
        urllc_covered_count=outcome.urllc_covered,
        urllc_throughput=urllc_tput,
        embb_throughput=embb_tput,
        sum_throughput=urllc_tput + embb_tput,
        uav_displacement=outcome.displacement,
        fallback_level=outcome.fallback_level,
        coverage_violations=violations,
        urllc_users=n_urllc,
        zone_size=outcome.zone_size,
        zu_size=outcome.zu_size,
        planned_embb_throughput=outcome.embb_throughput,
    )
    new_state = SimState(state.env, users, uav, state.mobility, state.fading, state.slot + 1)
    return new_state, metrics


def run_scenario(cfg: SimConfig, scenario: Scenario, seed: int | None = None) -> RunSummary:
    seed = cfg.seed if seed is None else seed
    state = initial_state(cfg, scenario, seed)
    slots = []
    for _ in range(cfg.slots):
        state, metrics = run_slot(state, cfg)
        slots.append(metrics)
    return RunSummary(cfg, seed, slots, excluded_users=len(scenario.excluded))


def run(cfg: SimConfig) -> RunSummary:
    """Generate the scenario for ``cfg.seed`` and simulate ``cfg.slots`` slots."""
    return run_scenario(cfg, generate_scenario(cfg, cfg.seed))


@dataclass(frozen=True)
class SweepCell:
    parameter: str
    value: float
    seed: int
    algorithm: str
    summary: RunSummary


def _sweep_job(args) -> SweepCell:
    base, parameter, value, seed, algorithm = args
    cfg = base.replace(**{SWEEP_PARAMS[parameter]: value, "seed": seed, "algorithm": algorithm})
    return SweepCell(parameter, value, seed, algorithm, run(cfg))


def sweep(base: SimConfig, parameter: str, values: Sequence[float], seeds: Sequence[int],
          algorithms: Sequence[str] | None = None, workers: int = 1) -> list[SweepCell]:
    """Run every (value, seed, algorithm) combination.

    ``algorithms`` defaults to both planners for the velocity sweep and to
    ``base.algorithm`` otherwise. Cells are independent; with ``workers > 1``
    they run in separate processes and are returned in the same order.
    """
    if parameter not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; choose from {sorted(SWEEP_PARAMS)}")
    if not values or not seeds:
        raise ValueError("sweep needs at least one value and one seed")
    if algorithms is None:
        algorithms = ("proposed", "baseline") if parameter == "user_vmax" else (base.algorithm,)
    if parameter in ("obstacle_count",):
        values = [int(v) for v in values]
    jobs = [(base, parameter, v, int(s), a) for v in values for s in seeds for a in algorithms]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_job, jobs))
    return [_sweep_job(j) for j in jobs]
