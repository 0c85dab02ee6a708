"""Planar disk geometry: lens areas, Apollonius circles, enclosing disks, lattices.

All positions are in meters. The planning plane is 2D (the UAV flies at a fixed
altitude), so every construction here works on disks in the plane.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

# Absolute tolerance for tangency and containment residuals (coordinates are O(1e2) m).
TOL = 1e-9
# Threshold below which a linear system is treated as singular.
SINGULAR_TOL = 1e-12


class Point2(tuple):
    """Immutable (x, y) pair in meters."""

    __slots__ = ()

    def __new__(cls, x: float, y: float):
        return super().__new__(cls, (float(x), float(y)))

    @property
    def x(self) -> float:
        return self[0]

    @property
    def y(self) -> float:
        return self[1]


@dataclass(frozen=True)
class Disk:
    """Closed disk ``{p : |p - center| <= radius}``."""

    center: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point2(*self.center))
        r = float(self.radius)
        if not r >= 0.0 or not math.isfinite(r):
            raise ValueError(f"radius must be finite and non-negative, got {self.radius}")
        object.__setattr__(self, "radius", r)
        if not all(math.isfinite(c) for c in self.center):
            raise ValueError(f"center must be finite, got {self.center}")

    @property
    def x(self) -> float:
        return self.center[0]

    @property
    def y(self) -> float:
        return self.center[1]

    def contains_disk(self, other: "Disk", tol: float = TOL) -> bool:
        d = math.hypot(other.x - self.x, other.y - self.y)
        return d + other.radius <= self.radius + tol

    def contains_points(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        dx = xy[..., 0] - self.x
        dy = xy[..., 1] - self.y
        return dx * dx + dy * dy <= self.radius * self.radius


# Apollonius and enclosing constructions return circles with the same fields as a disk.
Circle = Disk


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned lattice of square cells; cell (i, j) has center ``origin + (i + 0.5, j + 0.5) * cell_size``."""

    cell_size: float = 1.0
    origin: Point2 = Point2(0.0, 0.0)

    def __post_init__(self):
        if not self.cell_size > 0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        object.__setattr__(self, "origin", Point2(*self.origin))

    def centers(self, indices: np.ndarray) -> np.ndarray:
        """Cell centers for an (N, 2) integer index array."""
        idx = np.asarray(indices, dtype=np.int64).reshape(-1, 2)
        out = np.empty(idx.shape, dtype=float)
        out[:, 0] = self.origin[0] + (idx[:, 0] + 0.5) * self.cell_size
        out[:, 1] = self.origin[1] + (idx[:, 1] + 0.5) * self.cell_size
        return out


Region = Union[Disk, Sequence[Disk]]


def _distance(a: Disk, b: Disk) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def disk_overlap_area(a: Disk, b: Disk) -> float:
    """Area of the intersection (lens) of two disks.

    Uses the two-arccos lens formula with the Heron-type triangle term
    ``0.5 * sqrt((-d+r1+r2)(d+r1-r2)(d-r1+r2)(d+r1+r2))``.
    """
    r1, r2 = a.radius, b.radius
    d = _distance(a, b)
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    # Here d > 0, r1 > 0 and r2 > 0.
    c1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)
    c2 = (d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)
    c1 = min(1.0, max(-1.0, c1))
    c2 = min(1.0, max(-1.0, c2))
    prod = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
    eta = 0.5 * math.sqrt(max(prod, 0.0))
    area = r1 * r1 * math.acos(c1) + r2 * r2 * math.acos(c2) - eta
    return min(max(area, 0.0), math.pi * min(r1, r2) ** 2)


def tangency_residuals(circle: Circle, disks: Iterable[Disk]) -> np.ndarray:
    """``|(h - x_w)^2 + (k - y_w)^2 - (r_a - r_w)^2|`` for each disk."""
    out = []
    for d in disks:
        lhs = (circle.x - d.x) ** 2 + (circle.y - d.y) ** 2
        out.append(abs(lhs - (circle.radius - d.radius) ** 2))
    return np.array(out)


def _det3(m) -> float:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _polish(sol, c, r, iters: int = 4):
    # Newton refinement on the three squared tangency equations (Cramer's rule).
    h, k, ra = sol
    for _ in range(iters):
        rows, f = [], []
        for (x, y), rw in zip(c, r):
            dx, dy, dr = h - x, k - y, ra - rw
            rows.append((2 * dx, 2 * dy, -2 * dr))
            f.append(dx * dx + dy * dy - dr * dr)
        det = _det3(rows)
        if abs(det) < SINGULAR_TOL:
            break
        step = []
        for col in range(3):
            m = [list(row) for row in rows]
            for i in range(3):
                m[i][col] = f[i]
            step.append(_det3(m) / det)
        h, k, ra = h - step[0], k - step[1], ra - step[2]
        if max(map(abs, step)) < 1e-15 * max(1.0, abs(h), abs(k), abs(ra)):
            break
    return h, k, ra


def apollonius_circle(d1: Disk, d2: Disk, d3: Disk) -> Circle | None:
    """Smallest circle containing three disks and internally tangent to each.

    Solves ``(h - x_w)^2 + (k - y_w)^2 = (r_a - r_w)^2`` for ``w = 1, 2, 3``.
    Differencing the equations gives two linear equations in ``(h, k, r_a)``;
    their solution line is substituted back into the first equation, which
    leaves a quadratic along the line. Roots with ``r_a >= r_w`` for every
    disk are internal tangencies; the smallest such radius is returned.

    Returns ``None`` when the configuration has no internally tangent
    containing circle (including rank-deficient inputs such as coincident
    centers), which callers treat as "skip this triplet".
    """
    disks = (d1, d2, d3)
    sx = (d1.x + d2.x + d3.x) / 3.0
    sy = (d1.y + d2.y + d3.y) / 3.0
    c = [(d.x - sx, d.y - sy) for d in disks]
    r = [d.radius for d in disks]
    scale = max(1.0, max(abs(v) for p in c for v in p), max(r))

    (x0, y0), r0 = c[0], r[0]
    base = x0 * x0 + y0 * y0 - r0 * r0
    m, b = [], []
    for (x, y), rw in zip(c[1:], r[1:]):
        m.append((2 * (x - x0), 2 * (y - y0), -2 * (rw - r0)))
        b.append((x * x + y * y - rw * rw) - base)
    (a0, a1, a2), (b0, b1, b2) = m
    n = (a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0)
    norm = math.sqrt(n[0] ** 2 + n[1] ** 2 + n[2] ** 2)
    if norm < SINGULAR_TOL * scale * scale:
        return None
    n = (n[0] / norm, n[1] / norm, n[2] / norm)
    # least-norm point on the solution line: m^T (m m^T)^-1 b
    g00 = a0 * a0 + a1 * a1 + a2 * a2
    g01 = a0 * b0 + a1 * b1 + a2 * b2
    g11 = b0 * b0 + b1 * b1 + b2 * b2
    gdet = g00 * g11 - g01 * g01
    if abs(gdet) < SINGULAR_TOL * scale**4:
        return None
    l0 = (g11 * b[0] - g01 * b[1]) / gdet
    l1 = (g00 * b[1] - g01 * b[0]) / gdet
    p = (a0 * l0 + b0 * l1, a1 * l0 + b1 * l1, a2 * l0 + b2 * l1)

    u = (p[0] - x0, p[1] - y0, p[2] - r0)
    qa = n[0] ** 2 + n[1] ** 2 - n[2] ** 2
    qb = 2 * (u[0] * n[0] + u[1] * n[1] - u[2] * n[2])
    qc = u[0] ** 2 + u[1] ** 2 - u[2] ** 2
    if abs(qa) < SINGULAR_TOL:
        roots = [] if abs(qb) < SINGULAR_TOL else [-qc / qb]
    else:
        disc = qb * qb - 4 * qa * qc
        if disc < 0:
            if disc < -1e-9 * max(1.0, qb * qb):
                return None
            disc = 0.0
        sq = math.sqrt(disc)
        roots = [(-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)]

    rmax = max(r)
    best = None
    for t in roots:
        h, k, ra = _polish((p[0] + t * n[0], p[1] + t * n[1], p[2] + t * n[2]), c, r)
        if not (math.isfinite(h) and math.isfinite(k) and math.isfinite(ra)):
            continue
        if ra - rmax < -TOL:
            continue
        cand = Circle((h + sx, k + sy), max(ra, rmax))
        if np.max(tangency_residuals(cand, disks)) > TOL:
            continue
        if best is None or cand.radius < best.radius:
            best = cand
    return best


def _pair_enclosure(a: Disk, b: Disk) -> Circle:
    d = _distance(a, b)
    if d + b.radius <= a.radius:
        return Circle(a.center, a.radius)
    if d + a.radius <= b.radius:
        return Circle(b.center, b.radius)
    rad = 0.5 * (d + a.radius + b.radius)
    t = (rad - a.radius) / d
    return Circle((a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)), rad)


def _small_enclosure(disks: Sequence[Disk]) -> Circle:
    # Exhaustive over support sets of size 1..3; used when the tangent solver fails.
    cands: list[Circle] = [Circle(d.center, d.radius) for d in disks]
    cands += [_pair_enclosure(a, b) for a, b in itertools.combinations(disks, 2)]
    if len(disks) == 3:
        ap = apollonius_circle(*disks)
        if ap is not None:
            cands.append(ap)
    valid = [c for c in cands if all(c.contains_disk(d) for d in disks)]
    return min(valid, key=lambda c: c.radius)


def _triple_boundary(a: Disk, b: Disk, c: Disk) -> Circle:
    ap = apollonius_circle(a, b, c)
    return ap if ap is not None else _small_enclosure((a, b, c))


def min_enclosing_disk(disks: Sequence[Disk]) -> Circle:
    """Smallest circle containing every disk.

    Incremental randomized construction in the style of Welzl's algorithm,
    specialised to disks: support sets hold at most three disks, solved by
    the disk itself, the two-disk enclosure, or the three-disk internally
    tangent circle. The visiting order comes from a fixed-seed permutation,
    so the result is a pure function of the input.
    """
    disks = list(disks)
    if not disks:
        raise ValueError("min_enclosing_disk requires at least one disk")
    order = np.random.default_rng(0).permutation(len(disks))
    pts = [disks[i] for i in order]

    circ: Circle | None = None
    for i, p in enumerate(pts):
        if circ is None or not circ.contains_disk(p):
            circ = _mec_one(pts[:i], p)
    return circ


def _mec_one(pts: Sequence[Disk], p: Disk) -> Circle:
    circ = Circle(p.center, p.radius)
    for i, q in enumerate(pts):
        if not circ.contains_disk(q):
            circ = _mec_two(pts[:i], p, q)
    return circ


def _mec_two(pts: Sequence[Disk], p: Disk, q: Disk) -> Circle:
    circ = _pair_enclosure(p, q)
    for s in pts:
        if not circ.contains_disk(s):
            circ = _triple_boundary(p, q, s)
    return circ


def _as_disks(region: Region) -> list[Disk]:
    if isinstance(region, Disk):
        return [region]
    return list(region)


def lattice_indices(region: Region, grid: GridSpec, clip: Sequence[float] | None = None) -> np.ndarray:
    """Integer (i, j) indices of lattice cells whose centers lie in ``region``.

    ``region`` is a disk or an intersection of disks; ``clip`` is an optional
    rectangle ``(xmin, ymin, xmax, ymax)`` the centers must also lie in.
    Rows are ordered by j (y) then i (x).
    """
    disks = _as_disks(region)
    if not disks:
        raise ValueError("region must contain at least one disk")
    xmin = max(d.x - d.radius for d in disks)
    xmax = min(d.x + d.radius for d in disks)
    ymin = max(d.y - d.radius for d in disks)
    ymax = min(d.y + d.radius for d in disks)
    if clip is not None:
        xmin, ymin = max(xmin, clip[0]), max(ymin, clip[1])
        xmax, ymax = min(xmax, clip[2]), min(ymax, clip[3])
    if xmin > xmax or ymin > ymax:
        return np.empty((0, 2), dtype=np.int64)
    cs, (ox, oy) = grid.cell_size, grid.origin
    # One extra index on each side; the exact membership test below decides.
    i0 = math.floor((xmin - ox) / cs - 0.5) - 1
    i1 = math.ceil((xmax - ox) / cs - 0.5) + 1
    j0 = math.floor((ymin - oy) / cs - 0.5) - 1
    j1 = math.ceil((ymax - oy) / cs - 0.5) + 1
    jj, ii = np.meshgrid(np.arange(j0, j1 + 1), np.arange(i0, i1 + 1), indexing="ij")
    idx = np.column_stack([ii.ravel(), jj.ravel()]).astype(np.int64)
    xy = grid.centers(idx)
    mask = np.ones(len(idx), dtype=bool)
    for d in disks:
        mask &= d.contains_points(xy)
    if clip is not None:
        mask &= (xy[:, 0] >= clip[0]) & (xy[:, 0] <= clip[2])
        mask &= (xy[:, 1] >= clip[1]) & (xy[:, 1] <= clip[3])
    return idx[mask]


def discretize(region: Region, grid: GridSpec, clip: Sequence[float] | None = None) -> np.ndarray:
    """Centers of lattice cells inside ``region`` as an (N, 2) array, row-major by y then x."""
    return grid.centers(lattice_indices(region, grid, clip))
