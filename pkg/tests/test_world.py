import math

import numpy as np
import pytest
from conftest import embb, make_env, make_uav, urllc

from uavtraj.channel import RadioConfig, max_distance_for_rate
from uavtraj.config import ConfigError, SimConfig
from uavtraj.world import (
    ObstacleBox,
    UserState,
    covered,
    covered_mask,
    generate_obstacles,
    generate_scenario,
    has_los,
    los_matrix,
    reach_disk,
    reach_samples,
    step_users,
)


def sampled_blocked(a, b, boxes, n=4001):
    t = np.linspace(0, 1, n)[1:-1, None]
    pts = np.asarray(a) + t * (np.asarray(b) - np.asarray(a))
    for ob in boxes:
        lo, hi = np.array(ob.min_corner), np.array(ob.max_corner)
        if np.any(np.all((pts > lo) & (pts < hi), axis=1)):
            return True
    return False


class TestLineOfSight:
    def test_empty_environment(self):
        env = make_env()
        assert has_los((10, 10, 40), (90, 90, 0), env)

    def test_through_box(self):
        env = make_env([ObstacleBox((40, 40, 0), (60, 60, 30))])
        assert not has_los((50, 10, 10), (50, 90, 10), env)
        assert has_los((50, 10, 31), (50, 90, 31), env)

    def test_touching_face_is_not_blocked(self):
        env = make_env([ObstacleBox((40, 40, 0), (60, 60, 30))])
        # runs along the top face
        assert has_los((30, 50, 30), (70, 50, 30), env)
        # ends on a side face
        assert has_los((50, 10, 10), (50, 40, 10), env)
        # grazes an edge
        assert has_los((40, 10, 10), (40, 90, 10), env)

    def test_endpoint_inside_counts(self):
        env = make_env([ObstacleBox((40, 40, 0), (60, 60, 30))])
        assert not has_los((50, 50, 10), (50, 90, 10), env)

    def test_against_dense_sampling(self):
        rng = np.random.default_rng(0)
        agree = total = 0
        for _ in range(400):
            boxes = []
            for _ in range(3):
                x, y = rng.uniform(0, 80, 2)
                w, d = rng.uniform(5, 20, 2)
                boxes.append(ObstacleBox((x, y, 0), (x + w, y + d, rng.uniform(5, 50))))
            env = make_env(boxes)
            a = (*rng.uniform(0, 100, 2), rng.uniform(22, 60))
            b = (*rng.uniform(0, 100, 2), 0.0)
            got = not has_los(a, b, env)
            want = sampled_blocked(a, b, boxes)
            # a sample strictly inside a box proves blockage
            if want:
                assert got
            total += 1
            agree += got == want
        assert agree / total > 0.99

    def test_matrix_matches_scalar(self):
        rng = np.random.default_rng(1)
        env = make_env([ObstacleBox((30, 30, 0), (50, 45, 35)), ObstacleBox((60, 10, 0), (80, 25, 15))])
        a = np.column_stack([rng.uniform(0, 100, (5, 2)), np.full(5, 40.0)])
        b = np.column_stack([rng.uniform(0, 100, (7, 2)), np.zeros(7)])
        m = los_matrix(a, b, env)
        for i in range(5):
            for j in range(7):
                assert m[i, j] == has_los(a[i], b[j], env)


class TestCovered:
    def test_trivially_covered(self, radio):
        env = make_env()
        u = urllc(0, (50, 50), v=0.3)
        assert covered((50.5, 50.5), u, env, make_uav(), radio, 3.0)

    def test_wall_in_reach_disk(self, radio):
        env = make_env([ObstacleBox((48, 0, 0), (49, 100, 60))])
        u = urllc(0, (50.5, 50.5), v=3.0)
        # a tall wall cuts the reach disk, so part of it is hidden from either side
        assert not covered((42.5, 50.5), u, env, make_uav(), radio, 3.0)
        assert not covered((55.5, 50.5), u, env, make_uav(), radio, 3.0)

    def test_wall_between_uav_and_user(self, radio):
        env = make_env([ObstacleBox((30, 0, 0), (31, 100, 60))])
        u = urllc(0, (50.5, 50.5), v=1.0)
        assert not covered((25.5, 50.5), u, env, make_uav(), radio, 3.0)
        assert covered((60.5, 50.5), u, env, make_uav(), radio, 3.0)

    def test_rate_threshold_binds(self):
        # budget chosen so that 10 Mbps is reachable only out to ~20 m on the ground
        radio = RadioConfig(tx_power=-2.6)
        env = make_env()
        uav = make_uav((50.5, 50.5))
        d3 = max_distance_for_rate(radio, 10e6)
        ground = math.sqrt(d3 ** 2 - 40.0 ** 2)
        assert 15 < ground < 25
        inside = urllc(0, (50.5 + math.floor(ground) - 1, 50.5))
        outside = urllc(1, (50.5 + math.ceil(ground) + 1, 50.5))
        assert covered(uav.position, inside, env, uav, radio, 3.0)
        assert not covered(uav.position, outside, env, uav, radio, 3.0)

    def test_too_fast_user_never_coverable(self, radio):
        u = urllc(0, (50, 50), v=20.0)
        cells = np.array([[50.5, 50.5], [60.5, 50.5]])
        assert not covered_mask(cells, u, make_env(), make_uav(), radio, 3.0).any()

    def test_mask_agrees_with_brute_force(self, radio):
        env = make_env([ObstacleBox((45, 30, 0), (60, 40, 50))], cell=2.0)
        uav = make_uav((50, 50))
        u = urllc(0, (55.0, 20.0), v=2.0)
        cells = env.grid.centers(np.array([[i, j] for i in range(15, 35) for j in range(15, 35)]))
        samples = reach_samples(u, env, 3.0)
        budget_ok = max_distance_for_rate(radio, u.rate_threshold)
        want = []
        for z in cells:
            ok = math.dist(z, u.position) <= uav.coverage_radius - u.velocity * 3.0
            for w in samples:
                if not ok:
                    break
                top, ground = (z[0], z[1], 40.0), (w[0], w[1], 0.0)
                ok = math.dist(top, ground) <= budget_ok and has_los(top, ground, env)
            want.append(ok)
        got = covered_mask(cells, u, env, uav, radio, 3.0)
        assert got.tolist() == want
        assert 0 < sum(want) < len(want)

    def test_removing_obstacle_never_uncovers(self, radio):
        rng = np.random.default_rng(8)
        for _ in range(20):
            boxes = [ObstacleBox((x, y, 0), (x + 12, y + 12, rng.uniform(20, 60)))
                     for x, y in rng.uniform(10, 70, (2, 2))]
            u = urllc(0, tuple(rng.uniform(20, 80, 2)), v=rng.uniform(0, 3))
            cells = make_env().grid.centers(np.array([[i, j] for i in range(20, 80, 4) for j in range(20, 80, 4)]))
            full = covered_mask(cells, u, make_env(boxes), make_uav(), radio, 3.0)
            fewer = covered_mask(cells, u, make_env(boxes[:1]), make_uav(), radio, 3.0)
            assert not np.any(full & ~fewer)


def test_reach_samples_exclude_footprints_and_region():
    env = make_env([ObstacleBox((50, 50, 0), (60, 60, 20))])
    u = urllc(0, (49.0, 49.0), v=3.0)
    pts = reach_samples(u, env, 3.0)
    assert tuple(pts[0]) == (49.0, 49.0)
    assert not env.in_footprint(pts).any()
    assert np.all(np.hypot(pts[:, 0] - 49, pts[:, 1] - 49) <= 9.0)
    edge = reach_samples(urllc(1, (1.0, 1.0), v=3.0), env, 3.0)
    assert env.in_region(edge).all()


def test_reach_disk_radius():
    assert reach_disk(urllc(0, (1, 2), v=2.0), 3.0).radius == 6.0
    assert reach_disk(make_uav(vmax=10.0), 3.0).radius == 30.0
    with pytest.raises(ValueError):
        reach_disk(make_uav(), 0.0)


class TestMobility:
    def test_invariants(self):
        env = make_env([ObstacleBox((20, 20, 0), (40, 40, 30)), ObstacleBox((60, 50, 0), (75, 70, 30))])
        rng = np.random.default_rng(3)
        users = [embb(i, p, v) for i, (p, v) in enumerate(zip(rng.uniform(0, 100, (30, 2)), rng.uniform(0, 5, 30)))]
        users = [u for u in users if not env.in_footprint(u.position)[0]]
        streams = [np.random.default_rng([7, i]) for i in range(len(users))]
        for _ in range(60):
            moved = step_users(users, env, 3.0, streams)
            for a, b in zip(users, moved):
                assert math.dist(a.position, b.position) <= a.velocity * 3.0 + 1e-9
                assert env.in_region(b.position)[0]
                assert not env.in_footprint(b.position)[0]
                assert b.id == a.id and b.traffic_class == a.traffic_class
            users = moved

    def test_deterministic_and_static(self):
        env = make_env()
        users = [embb(0, (10, 10), 2.0), urllc(1, (50, 50), 0.0)]
        a = step_users(users, env, 3.0, [np.random.default_rng(1), np.random.default_rng(2)])
        b = step_users(users, env, 3.0, [np.random.default_rng(1), np.random.default_rng(2)])
        assert a == b
        assert a[1].position == users[1].position

    def test_single_generator_accepted(self):
        env = make_env()
        out = step_users([embb(0, (10, 10), 2.0)], env, 3.0, np.random.default_rng(0))
        assert math.dist(out[0].position, (10, 10)) == pytest.approx(6.0)


class TestScenario:
    def test_reproducible(self):
        cfg = SimConfig(obstacle_count=10)
        assert generate_scenario(cfg, 4) == generate_scenario(cfg, 4)
        assert generate_scenario(cfg, 4) != generate_scenario(cfg, 5)

    def test_contents(self):
        cfg = SimConfig(obstacle_count=15, users_total=35, urllc_fraction=0.4)
        sc = generate_scenario(cfg, 1)
        assert len(sc.env.obstacles) == 15
        assert len(sc.users) + len(sc.excluded) == 35
        assert sum(u.is_urllc for u in sc.users + sc.excluded) == 14
        pts = np.array([u.position for u in sc.users])
        assert sc.env.in_region(pts).all() and not sc.env.in_footprint(pts).any()
        assert all(u.velocity <= cfg.user_vmax for u in sc.users)
        assert all(u.rate_threshold == cfg.urllc_threshold for u in sc.users if u.is_urllc)

    def test_no_obstacles_means_full_los(self):
        sc = generate_scenario(SimConfig(obstacle_count=0), 2)
        top = (*sc.uav.position, sc.uav.altitude)
        assert all(has_los(top, (*u.position, 0.0), sc.env) for u in sc.users)

    def test_obstacle_sets_nest(self):
        few = generate_obstacles(SimConfig(obstacle_count=10), 6)
        many = generate_obstacles(SimConfig(obstacle_count=30), 6)
        assert many[:10] == few

    def test_capacity_excludes_farthest(self):
        sc = generate_scenario(SimConfig(users_total=12, uav_capacity=5), 3)
        assert len(sc.users) == 5 and len(sc.excluded) == 7
        far = min(math.dist(u.position, sc.uav.position) for u in sc.excluded)
        assert max(math.dist(u.position, sc.uav.position) for u in sc.users) <= far

    def test_overcrowded_region_rejected(self):
        cfg = SimConfig(region_width=40, region_height=40, obstacle_count=50, max_attempts=50)
        with pytest.raises(ConfigError):
            generate_obstacles(cfg, 0)


def test_validation():
    with pytest.raises(ValueError):
        ObstacleBox((0, 0, 1), (1, 1, 2))
    with pytest.raises(ValueError):
        ObstacleBox((0, 0, 0), (0, 1, 2))
    with pytest.raises(ValueError):
        make_uav(altitude=10.0)
    with pytest.raises(ValueError):
        UserState(0, (0, 0), 1.0, 0.0, "voice")
    with pytest.raises(ValueError):
        UserState(0, (0, 0), 1.0, 0.0, "urllc", 0.0)
    with pytest.raises(ValueError):
        make_env([ObstacleBox((90, 90, 0), (110, 110, 5))])
