"""Geometry-based UAV trajectory planning for mixed URLLC/eMBB users in mmWave.

Most users need only :class:`SimConfig`, :func:`run` and :func:`sweep`; the
geometry, channel, world and planner modules are importable on their own.
"""

from .channel import LOS_73GHZ, NLOS_73GHZ, LinkParams, RadioConfig, link_rate
from .config import ConfigError, SimConfig
from .geometry import Circle, Disk, GridSpec, Point2, apollonius_circle, discretize, disk_overlap_area, min_enclosing_disk
from .planner import PlanOutcome, plan, plan_baseline
from .simulator import RunSummary, SlotMetrics, run, run_scenario, run_slot, sweep
from .world import Environment, ObstacleBox, Scenario, UavState, UserState, generate_scenario, has_los

__version__ = "0.1.0"

__all__ = [
    "Circle", "ConfigError", "Disk", "Environment", "GridSpec", "LOS_73GHZ", "LinkParams", "NLOS_73GHZ",
    "ObstacleBox", "PlanOutcome", "Point2", "RadioConfig", "RunSummary", "Scenario", "SimConfig", "SlotMetrics",
    "UavState", "UserState", "apollonius_circle", "discretize", "disk_overlap_area", "generate_scenario", "has_los",
    "link_rate", "min_enclosing_disk", "plan", "plan_baseline", "run", "run_scenario", "run_slot", "sweep",
]
