"""Walk through the planar constructions the planner is built on.

Run: python demos/01_disk_geometry.py
"""

import math

from uavtraj.geometry import Disk, GridSpec, apollonius_circle, discretize, disk_overlap_area, min_enclosing_disk

# Three users who may each wander a few meters during a slot are three disks.
reach = [Disk((0.0, 0.0), 3.0), Disk((20.0, 4.0), 6.0), Disk((8.0, 18.0), 1.5)]
for i, d in enumerate(reach):
    print(f"user {i}: center {tuple(d.center)}, can move {d.radius} m")

# The smallest circle touching all three from the inside encloses every
# position they can reach. A UAV with coverage radius R standing within
# R - r of its center sees the whole group.
tangent = apollonius_circle(*reach)
print(f"\ntangent enclosing circle: center ({tangent.x:.3f}, {tangent.y:.3f}), radius {tangent.radius:.3f}")
for d in reach:
    gap = tangent.radius - math.dist(tangent.center, d.center) - d.radius
    print(f"  slack to disk at {tuple(d.center)}: {gap:.2e}")

# For two disks, or when one disk already fits inside the others' enclosure,
# the minimum enclosing disk is the relevant shape.
meb = min_enclosing_disk(reach)
print(f"\nminimum enclosing disk: center ({meb.x:.3f}, {meb.y:.3f}), radius {meb.radius:.3f}")
print(f"  (never larger than the tangent circle: {meb.radius <= tangent.radius + 1e-9})")

# Does the UAV's own reach disk overlap the feasible placement disk at all?
R = 46.0
placement = Disk(tangent.center, R - tangent.radius)
uav_reach = Disk((40.0, 30.0), 30.0)
print(f"\noverlap of placement disk and UAV reach disk: {disk_overlap_area(placement, uav_reach):.1f} m^2")

# Candidate cells are lattice centers in the intersection.
cells = discretize([placement, uav_reach], GridSpec(2.0))
print(f"{len(cells)} candidate cells on a 2 m lattice, first few: {cells[:3].tolist()}")
