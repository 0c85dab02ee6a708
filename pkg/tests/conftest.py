import numpy as np
import pytest

from uavtraj.channel import RadioConfig
from uavtraj.geometry import GridSpec
from uavtraj.world import EMBB, URLLC, Environment, ObstacleBox, UavState, UserState


@pytest.fixture
def radio():
    return RadioConfig()


def make_env(obstacles=(), size=100.0, cell=1.0):
    return Environment((0.0, 0.0, size, size), tuple(obstacles), GridSpec(cell))


def urllc(uid, xy, v=0.0, threshold=10e6):
    return UserState(uid, xy, v, 0.0, URLLC, threshold)


def embb(uid, xy, v=0.0):
    return UserState(uid, xy, v, 0.0, EMBB)


def make_uav(xy=(50.0, 50.0), altitude=40.0, vmax=10.0, radius=46.0, capacity=40):
    return UavState(xy, altitude, vmax, radius, capacity)


def small_scenario(seed, size=100.0, cell=2.0, max_urllc=3, max_embb=2, max_obstacles=2):
    """Random desk-scale scenario: a few users, at most two boxes, coarse grid."""
    g = np.random.default_rng(seed)
    obs = []
    for _ in range(int(g.integers(0, max_obstacles + 1))):
        w, d = g.uniform(10, 30, 2)
        x, y = g.uniform(0, size - w), g.uniform(0, size - d)
        box = ObstacleBox((x, y, 0.0), (x + w, y + d, g.uniform(10, 60)))
        apart = all(box.max_corner[0] <= o.min_corner[0] or o.max_corner[0] <= box.min_corner[0]
                    or box.max_corner[1] <= o.min_corner[1] or o.max_corner[1] <= box.min_corner[1] for o in obs)
        if apart:
            obs.append(box)
    env = make_env(obs, size, cell)

    def free():
        while True:
            p = g.uniform(0, size, 2)
            if not env.in_footprint(p)[0]:
                return p

    nu = int(g.integers(1, max_urllc + 1))
    ne = int(g.integers(0, max_embb + 1))
    S = [urllc(i, free(), g.uniform(0, 3)) for i in range(nu)]
    E = [embb(nu + i, free(), g.uniform(0, 3)) for i in range(ne)]
    uav = make_uav(tuple(g.uniform(0, size, 2)))
    return env, S, E, uav


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[name])
