"""Run both planners over the same scenarios and compare what users receive.

Run: python demos/03_compare_planners.py   
"""

import numpy as np

from uavtraj import SimConfig, run

cfg = SimConfig(users_total=20, obstacle_count=20, slots=30)
rows = []
for seed in range(4):
    for algorithm in ("proposed", "baseline"):
        s = run(cfg.replace(seed=seed, algorithm=algorithm))
        rows.append((seed, algorithm, s.means["urllc_throughput"], s.means["embb_throughput"],
                     s.means["sum_throughput"], s.means["urllc_covered_count"]))

print(f"{'seed':>4} {'planner':<9} {'URLLC':>8} {'eMBB':>8} {'sum':>8}  covered")
for seed, alg, u, e, t, c in rows:
    print(f"{seed:>4} {alg:<9} {u / 1e6:8.0f} {e / 1e6:8.0f} {t / 1e6:8.0f}  {c:5.2f}")

for alg in ("proposed", "baseline"):
    sums = [t for _, a, _, _, t, _ in rows if a == alg]
    print(f"mean sum throughput, {alg}: {np.mean(sums) / 1e6:.0f} Mbit/s")
