"""Plan a single slot by hand and look inside the decision.

Run: python demos/02_one_slot.py
"""

from uavtraj.channel import RadioConfig
from uavtraj.geometry import GridSpec
from uavtraj.planner import build_candidate_zone, coverage_matrix, plan, plan_baseline
from uavtraj.world import EMBB, URLLC, Environment, ObstacleBox, UavState, UserState

DT = 3.0
radio = RadioConfig()

# A 120 m square with one tall building west of center.
env = Environment((0, 0, 120, 120), (ObstacleBox((30, 40, 0), (45, 80, 55)),), GridSpec(1.0))
uav = UavState((60.5, 60.5), altitude=40.0, velocity_max=10.0, coverage_radius=46.0, capacity=40)

urllc = [
    UserState(0, (70, 55), 1.5, 0.0, URLLC, 10e6),
    UserState(1, (82, 70), 2.0, 0.0, URLLC, 10e6),
    UserState(2, (20, 60), 1.0, 0.0, URLLC, 10e6),  # hidden behind the building
]
embb = [UserState(3, (95, 90), 2.5, 0.0, EMBB), UserState(4, (60, 100), 1.0, 0.0, EMBB)]

zone = build_candidate_zone(urllc, None, env, uav, radio, DT)
print(f"candidate zone: {len(zone)} cells at the {zone.level!r} level")
M = coverage_matrix(zone, urllc, env, uav, radio, DT)
for uid, row in zip(M.user_ids, M.entries):
    print(f"  user {uid} covered from {row.sum()} of them")

out = plan(urllc, embb, uav, env, radio, DT)
print(f"\nproposed: fly {out.displacement:.1f} m to {tuple(out.chosen_cell)}")
print(f"  URLLC users covered {out.urllc_covered}, expected eMBB rate {out.embb_throughput / 1e6:.0f} Mbit/s")

base = plan_baseline(urllc + embb, uav, env, radio, DT, embb_threshold=10e6)
print(f"baseline: fly {base.displacement:.1f} m to {tuple(base.chosen_cell)}")
print(f"  URLLC users covered {base.urllc_covered}, expected eMBB rate {base.embb_throughput / 1e6:.0f} Mbit/s")
