"""Compiled inner loops for line-of-sight and per-cell rate evaluation.

Boxes are rows ``(xmin, ymin, zmin, xmax, ymax, zmax)``. A segment is blocked
only if its open interior passes through a box's open interior, so grazing a
face or touching at an endpoint does not block.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _axis_interval(o, d, lo, hi, tlo, thi):
    if d == 0.0:
        if lo < o < hi:
            return tlo, thi
        return 1.0, 0.0
    t0 = (lo - o) / d
    t1 = (hi - o) / d
    if t0 > t1:
        t0, t1 = t1, t0
    return max(tlo, t0), min(thi, t1)


@njit(cache=True)
def segment_hits_box(ax, ay, az, bx, by, bz, box):
    tlo, thi = 0.0, 1.0
    tlo, thi = _axis_interval(ax, bx - ax, box[0], box[3], tlo, thi)
    if tlo >= thi:
        return False
    tlo, thi = _axis_interval(ay, by - ay, box[1], box[4], tlo, thi)
    if tlo >= thi:
        return False
    tlo, thi = _axis_interval(az, bz - az, box[2], box[5], tlo, thi)
    return tlo < thi


@njit(cache=True)
def segment_blocked(ax, ay, az, bx, by, bz, boxes):
    for k in range(boxes.shape[0]):
        if segment_hits_box(ax, ay, az, bx, by, bz, boxes[k]):
            return True
    return False


@njit(cache=True)
def los_matrix(a, b, boxes):
    """``out[i, j]`` is True when ``a[i]`` and ``b[j]`` (both (., 3)) see each other."""
    out = np.empty((a.shape[0], b.shape[0]), dtype=np.bool_)
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            out[i, j] = not segment_blocked(a[i, 0], a[i, 1], a[i, 2], b[j, 0], b[j, 1], b[j, 2], boxes)
    return out


@njit(cache=True)
def shannon_rate(dist, alpha, beta, budget_dbm, noise_dbm, bandwidth):
    # budget_dbm = P_tx + G_tx + G_rx
    pl = alpha + 10.0 * beta * math.log10(dist)
    snr = 10.0 ** ((budget_dbm - pl) / 10.0) / 10.0 ** (noise_dbm / 10.0)
    return bandwidth * math.log2(1.0 + snr)


@njit(cache=True)
def covered_cells(cells, altitude, pts, boxes, alpha, beta, budget_dbm, noise_dbm, bandwidth, rate_req):
    """For each UAV cell (at ``altitude``), True iff every ground point in ``pts``
    has LoS and a deterministic LoS rate of at least ``rate_req``."""
    out = np.empty(cells.shape[0], dtype=np.bool_)
    for i in range(cells.shape[0]):
        cx = cells[i, 0]
        cy = cells[i, 1]
        ok = True
        for j in range(pts.shape[0]):
            dx = pts[j, 0] - cx
            dy = pts[j, 1] - cy
            dist = math.sqrt(dx * dx + dy * dy + altitude * altitude)
            if shannon_rate(dist, alpha, beta, budget_dbm, noise_dbm, bandwidth) < rate_req:
                ok = False
                break
            if segment_blocked(cx, cy, altitude, pts[j, 0], pts[j, 1], 0.0, boxes):
                ok = False
                break
        out[i] = ok
    return out


@njit(cache=True)
def mean_cell_rates(cells, altitude, pts, radius, boxes, los_alpha, los_beta, nlos_alpha, nlos_beta,
                    budget_dbm, noise_dbm, bandwidth):
    """Mean deterministic rate over the ground points within 2D ``radius`` of each cell;
    zero where no point qualifies. LoS or NLoS constants per point."""
    out = np.zeros(cells.shape[0])
    r2 = radius * radius
    for i in range(cells.shape[0]):
        cx = cells[i, 0]
        cy = cells[i, 1]
        total = 0.0
        count = 0
        for j in range(pts.shape[0]):
            dx = pts[j, 0] - cx
            dy = pts[j, 1] - cy
            g2 = dx * dx + dy * dy
            if g2 > r2:
                continue
            dist = math.sqrt(g2 + altitude * altitude)
            if segment_blocked(cx, cy, altitude, pts[j, 0], pts[j, 1], 0.0, boxes):
                total += shannon_rate(dist, nlos_alpha, nlos_beta, budget_dbm, noise_dbm, bandwidth)
            else:
                total += shannon_rate(dist, los_alpha, los_beta, budget_dbm, noise_dbm, bandwidth)
            count += 1
        if count > 0:
            out[i] = total / count
    return out
