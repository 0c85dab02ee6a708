"""Per-slot UAV position planning for mixed URLLC / eMBB users.

The proposed planner works in two stages:

1. URLLC candidate zone. For every triplet of URLLC users, the lattice
   cells of the UAV reach disk ``A`` from which all three are covered form
   the triplet's zone, and the zones are united. Pairs are tried only if
   every triplet zone is empty, and single users only if every pair zone is
   empty. In ``"enclosure"`` mode a group's zone is further restricted to
   ``Disk(center, R - r_a)`` of its enclosing circle (the Apollonius circle
   for triplets, the minimum enclosing disk for pairs, the reach disk
   itself for singles); the default ``"exact"`` mode keeps every covering
   cell, which makes the chosen cell optimal over the whole lattice of ``A``.
   A coverage matrix over the zone then selects the cells covering the most
   URLLC users. If no user is coverable at all, every cell of ``A`` is a
   candidate with zero URLLC coverage.
2. eMBB refinement. Among those cells, pick the one maximising the summed
   mean rate of the eMBB users over the part of their reach disks inside the
   coverage disk, breaking ties by displacement from the current position
   and then by row-major cell order.

Cells are identified by integer lattice indices on a single global grid, so
zones produced by different enclosures deduplicate exactly.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .channel import RadioConfig
from .geometry import Circle, Disk, GridSpec, Point2, apollonius_circle, discretize, disk_overlap_area, \
    lattice_indices, min_enclosing_disk
from .world import URLLC, Environment, UavState, UserState, covered_mask, reach_disk, reach_samples

TRIPLET = "triplet"
PAIR = "pair"
SINGLE = "single"
NONE = "none"
NO_URLLC = "no_urllc"

# Zone modes: "exact" keeps every reach-disk cell covering the whole group,
# "enclosure" only the cells inside Disk(c, R - r) of the group's enclosing circle.
EXACT = "exact"
ENCLOSURE = "enclosure"

# Relative slack when comparing aggregate eMBB throughputs for ties.
T_RTOL = 1e-12


@dataclass
class CandidateZone:
    indices: np.ndarray  # (N, 2) lattice indices, row-major by y then x
    cells: np.ndarray  # (N, 2) cell centers
    provenance: list[tuple[tuple[int, ...], ...]]  # generating user-id groups per cell
    level: str

    def __len__(self) -> int:
        return len(self.indices)


@dataclass
class CoverageMatrix:
    user_ids: tuple[int, ...]
    cells: np.ndarray
    entries: np.ndarray  # (|S|, |Z|) bool

    @property
    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)


@dataclass
class PlanOutcome:
    chosen_cell: Point2
    urllc_covered: int
    embb_throughput: float
    displacement: float
    fallback_level: str
    zone_size: int = 0
    zu_size: int = 0
    covered_ids: tuple[int, ...] = ()


@dataclass
class _SlotContext:
    """Lattice of the UAV's reach disk plus memoised per-user coverage over it."""

    env: Environment
    uav: UavState
    radio: RadioConfig
    dt: float
    zone_mode: str = EXACT
    reach: Disk = field(init=False)
    indices: np.ndarray = field(init=False)
    cells: np.ndarray = field(init=False)
    _masks: dict = field(init=False, default_factory=dict)

    def __post_init__(self):
        if self.zone_mode not in (EXACT, ENCLOSURE):
            raise ValueError(f"unknown zone mode {self.zone_mode!r}")
        self.reach = reach_disk(self.uav, self.dt)
        self.indices = lattice_indices(self.reach, self.env.grid, clip=self.env.region)
        self.cells = self.env.grid.centers(self.indices)

    def covered(self, user: UserState) -> np.ndarray:
        key = (user.id, user.traffic_class, user.rate_threshold)
        if key not in self._masks:
            self._masks[key] = covered_mask(self.cells, user, self.env, self.uav, self.radio, self.dt)
        return self._masks[key]


def zone_from_enclosure(enclosure: Circle, A: Disk, R: float, grid: GridSpec, clip=None) -> np.ndarray:
    """Lattice cells of ``Disk(enclosure.center, R - enclosure.radius)`` inside ``A``.

    Empty when the enclosure is wider than ``R`` or that disk does not overlap ``A``.
    """
    feasible = _enclosure_region(enclosure, A, R)
    if feasible is None:
        return np.empty((0, 2))
    return discretize([feasible, A], grid, clip)


def _enclosure_region(enclosure: Circle, A: Disk, R: float) -> Disk | None:
    if enclosure.radius > R:
        return None
    du = Disk(enclosure.center, R - enclosure.radius)
    if disk_overlap_area(A, du) <= 0:
        return None
    return du


def _zone_level(ctx: _SlotContext, S: Sequence[UserState], size: int):
    R = ctx.uav.coverage_radius
    masks = [ctx.covered(u) for u in S]
    disks = [reach_disk(u, ctx.dt) for u in S]
    usable = {i for i, m in enumerate(masks) if m.any()}
    # Enclosing radius of each pair. No cell covers a group in which some pair
    # needs more than R, so such groups are skipped in either mode.
    xy = np.array([d.center for d in disks]).reshape(-1, 2)
    rad = np.array([d.radius for d in disks])
    gap = np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])
    pair_r = np.maximum(np.maximum(rad[:, None], rad[None, :]), 0.5 * (gap + rad[:, None] + rad[None, :]))
    union = np.zeros(len(ctx.cells), dtype=bool)
    sources: dict[int, list[tuple[int, ...]]] = {}
    for group in itertools.combinations(range(len(S)), size):
        # a group with a member coverable from nowhere in A contributes nothing
        if any(i not in usable for i in group):
            continue
        if size > 1 and any(pair_r[i, j] > R for i, j in itertools.combinations(group, 2)):
            continue
        zone = np.ones(len(ctx.cells), dtype=bool)
        for i in group:
            zone &= masks[i]
        if ctx.zone_mode == ENCLOSURE and zone.any():
            zone &= _enclosure_cells(ctx, [disks[i] for i in group])
        if zone.any():
            union |= zone
            ids = tuple(S[i].id for i in group)
            for j in np.flatnonzero(zone):
                sources.setdefault(int(j), []).append(ids)
    return union, sources


def _enclosure_cells(ctx: _SlotContext, disks: Sequence[Disk]) -> np.ndarray:
    size = len(disks)
    if size == 3:
        enclosure = apollonius_circle(*disks)
    elif size == 2:
        enclosure = min_enclosing_disk(disks)
    else:
        enclosure = disks[0]
    du = None if enclosure is None else _enclosure_region(enclosure, ctx.reach, ctx.uav.coverage_radius)
    if du is None:
        return np.zeros(len(ctx.cells), dtype=bool)
    return du.contains_points(ctx.cells)


def _build_zone(ctx: _SlotContext, S: Sequence[UserState]) -> tuple[CandidateZone, np.ndarray]:
    for size, level in ((3, TRIPLET), (2, PAIR), (1, SINGLE)):
        if len(S) < size:
            continue
        union, sources = _zone_level(ctx, S, size)
        if union.any():
            cols = np.flatnonzero(union)
            zone = CandidateZone(ctx.indices[cols], ctx.cells[cols], [tuple(sources[int(j)]) for j in cols], level)
            return zone, cols
    return CandidateZone(np.empty((0, 2), dtype=np.int64), np.empty((0, 2)), [], NONE), np.empty(0, dtype=np.int64)


def build_candidate_zone(S: Sequence[UserState], A: Disk | None, env: Environment, uav: UavState,
                         radio: RadioConfig, dt: float, zone_mode: str = EXACT) -> CandidateZone:
    """Candidate cells for the UAV from which groups of URLLC users are covered.

    ``A`` defaults to (and must equal) the UAV's reach disk for ``dt``.
    Returns a zone with level ``"none"`` when no level yields any cell.
    """
    if not S:
        raise ValueError("build_candidate_zone needs at least one URLLC user")
    ctx = _SlotContext(env, uav, radio, dt, zone_mode)
    if A is not None and A != ctx.reach:
        raise ValueError("A must be the UAV reach disk for this slot")
    return _build_zone(ctx, S)[0]


def coverage_matrix(zone: CandidateZone, S: Sequence[UserState], env: Environment, uav: UavState,
                    radio: RadioConfig, dt: float) -> CoverageMatrix:
    entries = np.array([covered_mask(zone.cells, u, env, uav, radio, dt) for u in S], dtype=bool)
    return CoverageMatrix(tuple(u.id for u in S), zone.cells, entries.reshape(len(S), len(zone.cells)))


def select_urllc_cells(M: CoverageMatrix) -> np.ndarray:
    """Column indices whose column sum is maximal."""
    sums = M.column_sums
    if sums.size == 0:
        return np.empty(0, dtype=np.int64)
    return np.flatnonzero(sums == sums.max())


def embb_throughputs(cells, eu: UserState, env: Environment, uav: UavState, radio: RadioConfig,
                     dt: float, samples: np.ndarray | None = None) -> np.ndarray:
    """Mean deterministic rate of eMBB user ``eu`` over the samples of its reach disk
    inside ``Disk(z, R)``, for each cell ``z``; LoS or NLoS constants per sample."""
    cells = np.ascontiguousarray(np.asarray(cells, dtype=float).reshape(-1, 2))
    R = uav.coverage_radius
    r = eu.velocity * dt
    out = np.zeros(len(cells))
    near = np.hypot(cells[:, 0] - eu.position[0], cells[:, 1] - eu.position[1]) <= R + r
    if not near.any():
        return out
    if samples is None:
        samples = reach_samples(eu, env, dt)
    budget = radio.tx_power + radio.tx_gain + radio.rx_gain
    out[near] = _kernels.mean_cell_rates(
        np.ascontiguousarray(cells[near]), float(uav.altitude), np.ascontiguousarray(samples), float(R),
        env.boxes_near(eu.position, R + r), radio.los.alpha, radio.los.beta, radio.nlos.alpha, radio.nlos.beta,
        budget, radio.noise_power, radio.bandwidth,
    )
    return out


def embb_cell_throughput(z, eu: UserState, env: Environment, uav: UavState, radio: RadioConfig, dt: float) -> float:
    return float(embb_throughputs(np.array([z], dtype=float), eu, env, uav, radio, dt)[0])


def aggregate_embb(cells, S_embb: Sequence[UserState], env, uav, radio, dt) -> np.ndarray:
    total = np.zeros(len(cells))
    for eu in S_embb:
        total += embb_throughputs(cells, eu, env, uav, radio, dt)
    return total


def _nearest(cells: np.ndarray, candidates: np.ndarray, origin) -> int:
    # candidates are row-major ordered, so the first minimum is the row-major tie-break
    d = np.hypot(cells[candidates, 0] - origin[0], cells[candidates, 1] - origin[1])
    return int(candidates[int(np.argmin(d))])


def _fallback(users: Sequence[UserState], uav: UavState, env, radio, dt, embb) -> PlanOutcome:
    x0, y0 = uav.position
    if users:
        tx = sum(u.position[0] for u in users) / len(users)
        ty = sum(u.position[1] for u in users) / len(users)
        dist = math.hypot(tx - x0, ty - y0)
        step = min(dist, uav.velocity_max * dt)
        if dist > 0:
            x0, y0 = x0 + (tx - x0) * step / dist, y0 + (ty - y0) * step / dist
    pos = Point2(x0, y0)
    t = float(aggregate_embb(np.array([pos]), embb, env, uav, radio, dt)[0]) if embb else 0.0
    return PlanOutcome(pos, 0, t, math.dist(pos, uav.position), NONE)


def _check_capacity(n: int, uav: UavState):
    if n > uav.capacity:
        raise ValueError(f"{n} users exceed UAV capacity {uav.capacity}")


def plan(S: Sequence[UserState], S_embb: Sequence[UserState], uav: UavState, env: Environment,
         radio: RadioConfig, dt: float, zone_mode: str = EXACT) -> PlanOutcome:
    """Next UAV cell: most URLLC users covered, then most eMBB throughput, then least displacement.

    When no URLLC user can be covered the whole reach lattice is searched for
    eMBB throughput; if that is zero everywhere too, the UAV heads for the
    users' centroid instead (level ``"none"`` in both cases).
    """
    _check_capacity(len(S) + len(S_embb), uav)
    if not S and not S_embb:
        return _fallback([], uav, env, radio, dt, [])
    ctx = _SlotContext(env, uav, radio, dt, zone_mode)
    if not len(ctx.cells):
        return _fallback(list(S) + list(S_embb), uav, env, radio, dt, S_embb)

    level = NO_URLLC
    cols = np.arange(len(ctx.cells))
    if S:
        zone, zone_cols = _build_zone(ctx, S)
        level = zone.level
        if len(zone):
            cols = zone_cols
    entries = np.array([ctx.covered(u)[cols] for u in S], dtype=bool).reshape(len(S), len(cols))
    sums = entries.sum(axis=0)
    zu = np.flatnonzero(sums == sums.max())

    cells = ctx.cells[cols]
    t = aggregate_embb(cells[zu], S_embb, env, uav, radio, dt)
    best = t.max()
    if level == NONE and not best > 0:
        return _fallback(list(S) + list(S_embb), uav, env, radio, dt, S_embb)
    zu_star = zu[t >= best - T_RTOL * abs(best)]
    j = _nearest(cells, zu_star, uav.position)
    chosen = Point2(*cells[j])
    covered_ids = tuple(u.id for u, hit in zip(S, entries[:, j]) if hit)
    return PlanOutcome(
        chosen_cell=chosen,
        urllc_covered=int(sums[j]),
        embb_throughput=float(t[np.flatnonzero(zu == j)[0]]),
        displacement=math.dist(chosen, uav.position),
        fallback_level=level,
        zone_size=len(cols),
        zu_size=len(zu),
        covered_ids=covered_ids,
    )


def plan_baseline(users: Sequence[UserState], uav: UavState, env: Environment, radio: RadioConfig,
                  dt: float, embb_threshold: float, zone_mode: str = EXACT) -> PlanOutcome:
    """Reconstruction of a traffic-agnostic planner: every user is treated as URLLC
    (eMBB users get ``embb_threshold``), the coverage-maximising cells are found
    as in :func:`plan`, and the one nearest the current position is taken."""
    _check_capacity(len(users), uav)
    urllc = [u for u in users if u.is_urllc]
    embb = [u for u in users if not u.is_urllc]
    if not users:
        return _fallback([], uav, env, radio, dt, [])
    as_urllc = [u if u.is_urllc else dataclasses.replace(u, traffic_class=URLLC, rate_threshold=embb_threshold)
                for u in users]
    ctx = _SlotContext(env, uav, radio, dt, zone_mode)
    if not len(ctx.cells):
        return _fallback(list(users), uav, env, radio, dt, embb)
    zone, cols = _build_zone(ctx, as_urllc)
    if not len(zone):
        return _fallback(list(users), uav, env, radio, dt, embb)
    entries = np.array([ctx.covered(u)[cols] for u in as_urllc])
    sums = entries.sum(axis=0)
    zu = np.flatnonzero(sums == sums.max())
    cells = ctx.cells[cols]
    j = _nearest(cells, zu, uav.position)
    chosen = Point2(*cells[j])
    urllc_ids = {u.id for u in urllc}
    covered_ids = tuple(u.id for u, hit in zip(as_urllc, entries[:, j]) if hit and u.id in urllc_ids)
    t = float(aggregate_embb(cells[j:j + 1], embb, env, uav, radio, dt)[0]) if embb else 0.0
    return PlanOutcome(
        chosen_cell=chosen,
        urllc_covered=len(covered_ids),
        embb_throughput=t,
        displacement=math.dist(chosen, uav.position),
        fallback_level=zone.level,
        zone_size=len(cols),
        zu_size=len(zu),
        covered_ids=covered_ids,
    )
