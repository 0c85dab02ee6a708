import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavtraj.geometry import (
    Disk,
    GridSpec,
    Point2,
    apollonius_circle,
    discretize,
    disk_overlap_area,
    lattice_indices,
    min_enclosing_disk,
    tangency_residuals,
)

coord = st.floats(-100, 100, allow_nan=False)
radius = st.floats(0, 30, allow_nan=False)
disks = st.builds(lambda x, y, r: Disk((x, y), r), coord, coord, radius)


def mc_overlap(a, b, n, rng):
    # sample the bounding box of the smaller disk
    s = a if a.radius <= b.radius else b
    pts = rng.uniform(-s.radius, s.radius, (n, 2)) + np.array(s.center)
    inside = a.contains_points(pts) & b.contains_points(pts)
    box = (2 * s.radius) ** 2
    p = inside.mean()
    return box * p, box * math.sqrt(p * (1 - p) / n)


class TestOverlap:
    def test_unit_disks_one_apart(self):
        # two unit disks at distance 1: 2*pi/3 - sqrt(3)/2
        got = disk_overlap_area(Disk((0, 0), 1), Disk((1, 0), 1))
        assert got == pytest.approx(2 * math.pi / 3 - math.sqrt(3) / 2, rel=1e-12)

    def test_disjoint_and_tangent(self):
        assert disk_overlap_area(Disk((0, 0), 1), Disk((3, 0), 1)) == 0.0
        assert disk_overlap_area(Disk((0, 0), 1), Disk((2, 0), 1)) == 0.0

    def test_contained(self):
        assert disk_overlap_area(Disk((0, 0), 5), Disk((1, 1), 2)) == pytest.approx(4 * math.pi)

    def test_zero_radius(self):
        assert disk_overlap_area(Disk((0, 0), 0), Disk((0, 0), 3)) == 0.0

    def test_monte_carlo(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            a = Disk(rng.uniform(-10, 10, 2), rng.uniform(1, 10))
            b = Disk(rng.uniform(-10, 10, 2), rng.uniform(1, 10))
            est, se = mc_overlap(a, b, 200_000, rng)
            assert abs(disk_overlap_area(a, b) - est) <= 5 * se + 1e-9

    @given(disks, disks)
    def test_symmetric_and_bounded(self, a, b):
        ab = disk_overlap_area(a, b)
        assert ab == pytest.approx(disk_overlap_area(b, a), abs=1e-9)
        assert 0.0 <= ab <= math.pi * min(a.radius, b.radius) ** 2 + 1e-9


class TestApollonius:
    def test_points_give_circumcircle(self):
        c = apollonius_circle(Disk((0, 0), 0), Disk((4, 0), 0), Disk((0, 3), 0))
        assert c.center == pytest.approx((2.0, 1.5))
        assert c.radius == pytest.approx(2.5)

    def test_equal_radii_shift_circumradius(self):
        s = 10.0
        pts = [(0, 0), (s, 0), (s / 2, s * math.sqrt(3) / 2)]
        c = apollonius_circle(*(Disk(p, 1.0) for p in pts))
        assert c.radius == pytest.approx(s / math.sqrt(3) + 1.0)

    def test_collinear_centers(self):
        # the middle disk touches the enclosing circle along the whole line
        c = apollonius_circle(Disk((-2, 0), 1), Disk((0, 0), 3), Disk((2, 0), 1))
        assert c.center == pytest.approx((0.0, 0.0), abs=1e-9)
        assert c.radius == pytest.approx(3.0)

    def test_collinear_equal_disks_have_no_tangent_circle(self):
        assert apollonius_circle(Disk((-2, 0), 1), Disk((0, 0), 1), Disk((2, 0), 1)) is None

    def test_random_triplets(self):
        rng = np.random.default_rng(3)
        solved = 0
        for _ in range(300):
            ds = [Disk(rng.uniform(0, 100, 2), rng.uniform(0, 10)) for _ in range(3)]
            c = apollonius_circle(*ds)
            if c is None:
                continue
            solved += 1
            assert tangency_residuals(c, ds).max() < 1e-9
            assert all(c.contains_disk(d, 1e-7) for d in ds)
        assert solved > 200

    def test_nested_input_has_no_tangent_circle_through_inner_disk(self):
        # the small disk sits inside the big one, so a circle tangent to all three cannot also be minimal
        out = apollonius_circle(Disk((0, 0), 10), Disk((1, 0), 1), Disk((30, 0), 1))
        if out is not None:
            assert tangency_residuals(out, [Disk((0, 0), 10), Disk((1, 0), 1), Disk((30, 0), 1)]).max() < 1e-9


def grid_oracle(ds, steps=201):
    """Minimise max_i(|p - c_i| + r_i) by successively refined grid search."""
    xy = np.array([d.center for d in ds])
    r = np.array([d.radius for d in ds])
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    center = (lo + hi) / 2
    half = max(hi - lo) / 2 + 1.0
    best = math.inf
    for _ in range(8):
        g = np.linspace(-half, half, steps)
        px, py = np.meshgrid(center[0] + g, center[1] + g)
        f = np.max(np.hypot(px[..., None] - xy[:, 0], py[..., None] - xy[:, 1]) + r, axis=-1)
        k = np.unravel_index(np.argmin(f), f.shape)
        best = min(best, f[k])
        center = np.array([px[k], py[k]])
        half = half * 4 / steps * 2
    return best


class TestMinEnclosing:
    def test_two_disks(self):
        c = min_enclosing_disk([Disk((0, 0), 1), Disk((4, 0), 1)])
        assert c.center == pytest.approx((2.0, 0.0))
        assert c.radius == pytest.approx(3.0)

    def test_single_and_nested(self):
        assert min_enclosing_disk([Disk((1, 2), 3)]) == Disk((1, 2), 3)
        assert min_enclosing_disk([Disk((0, 0), 5), Disk((1, 1), 1)]).radius == pytest.approx(5.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            min_enclosing_disk([])

    def test_against_grid_search(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            ds = [Disk(rng.uniform(0, 50, 2), rng.uniform(0, 8)) for _ in range(int(rng.integers(3, 9)))]
            c = min_enclosing_disk(ds)
            assert all(c.contains_disk(d, 1e-7) for d in ds)
            assert c.radius == pytest.approx(grid_oracle(ds), abs=1e-3)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(disks, min_size=1, max_size=8))
    def test_contains_inputs_and_order_free(self, ds):
        c = min_enclosing_disk(ds)
        assert all(c.contains_disk(d, 1e-6) for d in ds)
        assert c.radius >= max(d.radius for d in ds) - 1e-9
        rev = min_enclosing_disk(ds[::-1])
        assert rev.radius == pytest.approx(c.radius, abs=1e-6)


def brute_cells(region, cs, origin=(0.0, 0.0), clip=None):
    ds = [region] if isinstance(region, Disk) else list(region)
    reach = max(abs(v) for d in ds for v in (d.x, d.y)) + max(d.radius for d in ds) + 2 * cs
    n = int(reach / cs) + 2
    out = []
    for j in range(-n, n + 1):
        for i in range(-n, n + 1):
            x, y = origin[0] + (i + 0.5) * cs, origin[1] + (j + 0.5) * cs
            if all((x - d.x) ** 2 + (y - d.y) ** 2 <= d.radius ** 2 for d in ds):
                if clip is None or (clip[0] <= x <= clip[2] and clip[1] <= y <= clip[3]):
                    out.append((x, y))
    return out


class TestDiscretize:
    def test_radius_five_unit_grid(self):
        assert len(discretize(Disk((0, 0), 5), GridSpec(1.0))) == len(brute_cells(Disk((0, 0), 5), 1.0))

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        cs = float(rng.choice([0.5, 1.0, 2.0]))
        region = [Disk(rng.uniform(-10, 10, 2), rng.uniform(2, 15)) for _ in range(int(rng.integers(1, 3)))]
        clip = (-5.0, -8.0, 12.0, 9.0) if seed % 2 else None
        got = discretize(region, GridSpec(cs), clip)
        want = brute_cells(region, cs, clip=clip)
        assert sorted(map(tuple, got)) == pytest.approx(sorted(want))

    def test_row_major_order(self):
        pts = discretize(Disk((0, 0), 4), GridSpec(1.0))
        keys = [(y, x) for x, y in pts]
        assert keys == sorted(keys)

    def test_boundary_centers_included(self):
        # center (2.5, 0.5) lies exactly on the circle
        pts = discretize(Disk((0, 0.5), 2.5), GridSpec(1.0))
        assert any(np.allclose(p, (2.5, 0.5)) for p in pts)

    def test_empty_intersection(self):
        assert len(discretize([Disk((0, 0), 1), Disk((10, 0), 1)], GridSpec(1.0))) == 0

    def test_indices_share_global_lattice(self):
        g = GridSpec(2.0)
        a = {tuple(r) for r in lattice_indices(Disk((0, 0), 6), g)}
        b = {tuple(r) for r in lattice_indices(Disk((3, 1), 6), g)}
        both = {tuple(r) for r in lattice_indices([Disk((0, 0), 6), Disk((3, 1), 6)], g)}
        assert both == a & b


def test_point2_and_disk_validation():
    p = Point2(1, 2)
    assert (p.x, p.y) == (1.0, 2.0)
    with pytest.raises(ValueError):
        Disk((0, 0), -1)
    with pytest.raises(ValueError):
        Disk((math.nan, 0), 1)
    with pytest.raises(ValueError):
        GridSpec(0.0)


def test_apollonius_degenerate_identical_points():
    d = Disk((1, 1), 0)
    out = apollonius_circle(d, d, d)
    assert out is None or out.radius == pytest.approx(0.0, abs=1e-9)


def test_pairwise_enclosures_never_exceed_triple():
    rng = np.random.default_rng(9)
    for _ in range(50):
        ds = [Disk(rng.uniform(0, 30, 2), rng.uniform(0, 5)) for _ in range(3)]
        full = min_enclosing_disk(ds).radius
        for pair in itertools.combinations(ds, 2):
            assert min_enclosing_disk(list(pair)).radius <= full + 1e-9
