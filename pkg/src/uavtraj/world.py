"""Environment state: obstacles, line of sight, mobility and coverage predicates.

Users are ground points ``(x, y, 0)``; the UAV hovers at ``(x, y, altitude)``.
Obstacles are axis-aligned boxes standing on the ground.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .channel import RadioConfig
from .config import ConfigError, SimConfig, substream
from .geometry import Disk, GridSpec, Point2, lattice_indices

URLLC = "urllc"
EMBB = "embb"


@dataclass(frozen=True)
class ObstacleBox:
    min_corner: tuple[float, float, float]
    max_corner: tuple[float, float, float]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.min_corner)
        hi = tuple(float(v) for v in self.max_corner)
        if len(lo) != 3 or len(hi) != 3:
            raise ValueError("box corners must be 3D")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError(f"box corners must satisfy min < max, got {lo} / {hi}")
        if lo[2] != 0.0:
            raise ValueError("obstacles stand on the ground (min z = 0)")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @property
    def height(self) -> float:
        return self.max_corner[2]

    def as_row(self) -> tuple[float, ...]:
        return self.min_corner + self.max_corner


@dataclass(frozen=True)
class Environment:
    region: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax
    obstacles: tuple[ObstacleBox, ...] = ()
    grid: GridSpec = GridSpec()

    def __post_init__(self):
        object.__setattr__(self, "region", tuple(float(v) for v in self.region))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        x0, y0, x1, y1 = self.region
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate region {self.region}")
        for ob in self.obstacles:
            (ax, ay, _), (bx, by, _) = ob.min_corner, ob.max_corner
            if ax < x0 or ay < y0 or bx > x1 or by > y1:
                raise ValueError(f"obstacle {ob} lies outside region {self.region}")
        boxes = np.array([ob.as_row() for ob in self.obstacles], dtype=float).reshape(-1, 6)
        boxes.setflags(write=False)
        object.__setattr__(self, "boxes", boxes)

    def boxes_near(self, center, radius: float) -> np.ndarray:
        """Boxes whose footprint meets the square of half-side ``radius`` around ``center``."""
        b = self.boxes
        cx, cy = center
        keep = (b[:, 3] >= cx - radius) & (b[:, 0] <= cx + radius) & (b[:, 4] >= cy - radius) & (b[:, 1] <= cy + radius)
        return np.ascontiguousarray(b[keep])

    def in_footprint(self, xy) -> np.ndarray:
        """True where a ground point lies strictly inside some obstacle footprint."""
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        b = self.boxes
        if len(b) == 0:
            return np.zeros(len(xy), dtype=bool)
        x = xy[:, 0:1]
        y = xy[:, 1:2]
        inside = (x > b[:, 0]) & (x < b[:, 3]) & (y > b[:, 1]) & (y < b[:, 4])
        return inside.any(axis=1)

    def in_region(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        x0, y0, x1, y1 = self.region
        return (xy[:, 0] >= x0) & (xy[:, 0] <= x1) & (xy[:, 1] >= y0) & (xy[:, 1] <= y1)


@dataclass(frozen=True)
class UserState:
    id: int
    position: Point2
    velocity: float  # m/s
    heading: float  # rad
    traffic_class: str
    rate_threshold: float = 0.0  # bit/s, URLLC only
    waypoint: Point2 | None = None

    def __post_init__(self):
        object.__setattr__(self, "position", Point2(*self.position))
        if self.waypoint is not None:
            object.__setattr__(self, "waypoint", Point2(*self.waypoint))
        if self.traffic_class not in (URLLC, EMBB):
            raise ValueError(f"traffic_class must be {URLLC!r} or {EMBB!r}")
        if self.velocity < 0:
            raise ValueError("velocity must be non-negative")
        if self.traffic_class == URLLC and not self.rate_threshold > 0:
            raise ValueError("URLLC users need a positive rate threshold")

    @property
    def is_urllc(self) -> bool:
        return self.traffic_class == URLLC


@dataclass(frozen=True)
class UavState:
    position: Point2
    altitude: float
    velocity_max: float
    coverage_radius: float
    capacity: int

    def __post_init__(self):
        object.__setattr__(self, "position", Point2(*self.position))
        if not 22.0 <= self.altitude <= 150.0:
            raise ValueError(f"altitude must lie in [22, 150] m, got {self.altitude}")
        if not self.coverage_radius > 0:
            raise ValueError("coverage_radius must be positive")
        if self.velocity_max < 0:
            raise ValueError("velocity_max must be non-negative")


def has_los(a, b, env: Environment) -> bool:
    """True iff the open segment between 3D points ``a`` and ``b`` misses every box interior."""
    ax, ay, az = map(float, a)
    bx, by, bz = map(float, b)
    return not _kernels.segment_blocked(ax, ay, az, bx, by, bz, env.boxes)


def los_matrix(a, b, env: Environment) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=float).reshape(-1, 3))
    b = np.ascontiguousarray(np.asarray(b, dtype=float).reshape(-1, 3))
    return _kernels.los_matrix(a, b, env.boxes)


def reach_disk(entity: UserState | UavState, dt: float) -> Disk:
    """Disk the entity cannot leave during one slot of length ``dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    speed = entity.velocity_max if isinstance(entity, UavState) else entity.velocity
    return Disk(entity.position, speed * dt)


def reach_samples(user: UserState, env: Environment, dt: float) -> np.ndarray:
    """Ground points standing in for the user's reach disk.

    Lattice centers inside the disk and the region, excluding obstacle
    footprints (users never stand there), plus the user's own position so the
    set is never empty.
    """
    disk = reach_disk(user, dt)
    pts = env.grid.centers(lattice_indices(disk, env.grid, clip=env.region))
    pts = pts[~env.in_footprint(pts)]
    return np.vstack([np.array([user.position], dtype=float), pts])


def coverable(uav_xy, user: UserState, R: float, dt: float) -> bool:
    r = user.velocity * dt
    if R < r:
        return False
    return math.dist(uav_xy, user.position) <= R - r


def coverable_mask(cells_xy: np.ndarray, user: UserState, R: float, dt: float) -> np.ndarray:
    r = user.velocity * dt
    if R < r:
        return np.zeros(len(cells_xy), dtype=bool)
    d = np.hypot(cells_xy[:, 0] - user.position[0], cells_xy[:, 1] - user.position[1])
    return d <= R - r


def covered_mask(cells_xy, user: UserState, env: Environment, uav: UavState, radio: RadioConfig,
                 dt: float, samples: np.ndarray | None = None) -> np.ndarray:
    """Vectorised :func:`covered` over an (M, 2) array of UAV cells."""
    cells_xy = np.ascontiguousarray(np.asarray(cells_xy, dtype=float).reshape(-1, 2))
    out = coverable_mask(cells_xy, user, uav.coverage_radius, dt)
    if not out.any():
        return out
    if samples is None:
        samples = reach_samples(user, env, dt)
    boxes = env.boxes_near(user.position, uav.coverage_radius)
    budget = radio.tx_power + radio.tx_gain + radio.rx_gain
    sub = np.ascontiguousarray(cells_xy[out])
    out[out] = _kernels.covered_cells(
        sub, float(uav.altitude), np.ascontiguousarray(samples), boxes,
        radio.los.alpha, radio.los.beta, budget, radio.noise_power, radio.bandwidth,
        float(user.rate_threshold),
    )
    return out


def covered(uav_xy, user: UserState, env: Environment, uav: UavState, radio: RadioConfig, dt: float) -> bool:
    """Coverable, and every point of the user's reach disk has LoS to the UAV at a
    deterministic LoS rate of at least the user's threshold."""
    return bool(covered_mask(np.array([uav_xy], dtype=float), user, env, uav, radio, dt)[0])


def _random_free_point(rng: np.random.Generator, env: Environment, attempts: int) -> Point2:
    x0, y0, x1, y1 = env.region
    for _ in range(attempts):
        p = (rng.uniform(x0, x1), rng.uniform(y0, y1))
        if not env.in_footprint(p)[0]:
            return Point2(*p)
    raise ConfigError(f"no obstacle-free point found after {attempts} attempts")


def _advance(pos, waypoint, distance, rng, env, attempts):
    p = np.array(pos, dtype=float)
    w = np.array(waypoint, dtype=float)
    remaining = distance
    while remaining > 0:
        seg = float(np.hypot(*(w - p)))
        if seg <= remaining:
            p = w
            remaining -= seg
            w = np.array(_random_free_point(rng, env, attempts), dtype=float)
        else:
            p = p + (w - p) * (remaining / seg)
            remaining = 0.0
    return p, w


def step_users(users: Sequence[UserState], env: Environment, dt: float, rng, attempts: int = 1000) -> list[UserState]:
    """Advance every user by ``velocity * dt`` of random-waypoint motion.

    ``rng`` is either one generator shared in user order or a sequence with
    one generator per user. A move whose end point would fall inside an
    obstacle footprint is retried from the start position towards a freshly
    drawn waypoint; after 20 failed retries the user stays put.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    rngs = rng if isinstance(rng, (list, tuple)) else [rng] * len(users)
    x0, y0, x1, y1 = env.region
    out = []
    for user, g in zip(users, rngs):
        wp = user.waypoint if user.waypoint is not None else _random_free_point(g, env, attempts)
        if user.velocity == 0:
            out.append(dataclasses.replace(user, waypoint=wp))
            continue
        new_pos, new_wp = user.position, wp
        for _ in range(20):
            p, w = _advance(user.position, wp, user.velocity * dt, g, env, attempts)
            p = np.clip(p, [x0, y0], [x1, y1])
            if not env.in_footprint(p)[0]:
                new_pos, new_wp = p, w
                break
            wp = _random_free_point(g, env, attempts)
        else:
            new_wp = wp
        heading = math.atan2(new_wp[1] - new_pos[1], new_wp[0] - new_pos[0])
        out.append(dataclasses.replace(user, position=Point2(*new_pos), waypoint=Point2(*new_wp), heading=heading))
    return out


class Scenario(NamedTuple):
    env: Environment
    users: list[UserState]
    uav: UavState
    excluded: list[UserState]


def _footprints_overlap(a: ObstacleBox, b: ObstacleBox) -> bool:
    return not (a.max_corner[0] <= b.min_corner[0] or b.max_corner[0] <= a.min_corner[0]
                or a.max_corner[1] <= b.min_corner[1] or b.max_corner[1] <= a.min_corner[1])


def generate_obstacles(cfg: SimConfig, seed: int) -> tuple[ObstacleBox, ...]:
    """Non-overlapping boxes, drawn in sequence from one stream so that a
    scenario with n obstacles extends the one with fewer."""
    rng = substream(seed, "obstacles")
    x0, y0, x1, y1 = cfg.region
    boxes: list[ObstacleBox] = []
    for k in range(cfg.obstacle_count):
        for _ in range(cfg.max_attempts):
            w = rng.uniform(cfg.obstacle_side_min, cfg.obstacle_side_max)
            d = rng.uniform(cfg.obstacle_side_min, cfg.obstacle_side_max)
            h = rng.uniform(cfg.obstacle_height_min, cfg.obstacle_height_max)
            if w > x1 - x0 or d > y1 - y0:
                continue
            bx = rng.uniform(x0, x1 - w)
            by = rng.uniform(y0, y1 - d)
            box = ObstacleBox((bx, by, 0.0), (bx + w, by + d, h))
            if not any(_footprints_overlap(box, o) for o in boxes):
                boxes.append(box)
                break
        else:
            raise ConfigError(f"could not place obstacle {k + 1} of {cfg.obstacle_count} "
                              f"after {cfg.max_attempts} attempts; region too small")
    return tuple(boxes)


def generate_scenario(cfg: SimConfig, seed: int | None = None) -> Scenario:
    """Obstacles, users and UAV for one run, fully determined by ``seed``.

    The first ``round_half_up(count * urllc_fraction)`` user ids are URLLC.
    Each user draws from its own substream, so changing the obstacle layout
    only moves the users it would otherwise bury. Users beyond the UAV's
    capacity are assigned nearest-first and the rest returned as ``excluded``.
    """
    seed = cfg.seed if seed is None else seed
    env = Environment(cfg.region, generate_obstacles(cfg, seed), GridSpec(cfg.cell_size))
    users = []
    n_urllc = cfg.urllc_count
    for i in range(cfg.users_total):
        g = substream(seed, "users", i)
        pos = _random_free_point(g, env, cfg.max_attempts)
        speed = 0.0
        while cfg.user_vmax > 0 and speed == 0.0:
            speed = g.uniform(0.0, cfg.user_vmax)
        wp = _random_free_point(g, env, cfg.max_attempts)
        is_urllc = i < n_urllc
        users.append(UserState(
            id=i,
            position=pos,
            velocity=speed,
            heading=math.atan2(wp[1] - pos[1], wp[0] - pos[0]),
            traffic_class=URLLC if is_urllc else EMBB,
            rate_threshold=cfg.urllc_threshold if is_urllc else 0.0,
            waypoint=wp,
        ))
    g = substream(seed, "uav")
    x0, y0, x1, y1 = cfg.region
    uav = UavState(
        position=(g.uniform(x0, x1), g.uniform(y0, y1)),
        altitude=cfg.uav_altitude,
        velocity_max=cfg.uav_vmax,
        coverage_radius=cfg.coverage_radius,
        capacity=cfg.uav_capacity,
    )
    order = sorted(users, key=lambda u: (math.dist(u.position, uav.position), u.id))
    kept_ids = {u.id for u in order[: cfg.uav_capacity]}
    kept = [u for u in users if u.id in kept_ids]
    excluded = [u for u in users if u.id not in kept_ids]
    return Scenario(env, kept, uav, excluded)
