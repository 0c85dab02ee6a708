"""Sweep obstacle density and write the long-format CSV a plotting tool can read.

Run: python demos/04_sweep_to_csv.py [out.csv]
"""

import sys
from collections import defaultdict

from uavtraj import SimConfig, sweep
from uavtraj.records import sweep_csv

out = sys.argv[1] if len(sys.argv) > 1 else "obstacle_sweep.csv"
cells = sweep(SimConfig(slots=20), "obstacle_count", [0, 20, 40], seeds=[0, 1, 2])
with open(out, "w", newline="") as fh:
    fh.write(sweep_csv(cells))
print(f"wrote {len(cells)} rows to {out}")

by_count = defaultdict(list)
for c in cells:
    by_count[c.value].append(c.summary.means["sum_throughput"])
for n, v in sorted(by_count.items()):
    print(f"{n:>3} obstacles: mean sum throughput {sum(v) / len(v) / 1e6:.0f} Mbit/s over {len(v)} seeds")
