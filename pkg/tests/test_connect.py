import math

import numpy as np
import pytest

from randcomplex import (
    BoxWindow,
    HyperbolicDiskWindow,
    MarkSpace,
    cech_system,
    constant_system,
    hyperbolic_chart_distance,
    hyperbolic_geometric_system,
    hyperbolic_line_system,
    indicator_profile,
    mark_radius_profile,
    rips_system,
    sample_poisson,
    smallest_enclosing_radius,
    stationary_indicator_system,
    stationary_marked_system,
)

SHIPPED = [
    ("constant", constant_system(2, (0.4, 0.7)), "euclidean"),
    ("rips", rips_system(2, 0.4), "euclidean"),
    ("cech", cech_system(2, 0.3), "euclidean"),
    ("stationary", stationary_indicator_system(2, 0.3), "euclidean"),
    ("hyperbolic_geometric", hyperbolic_geometric_system(2, 0.5, (0.5,)), "hyperbolic"),
    ("hyperbolic_lines", hyperbolic_line_system(0.5), "hyperbolic"),
]


def _tuples(name, chart, rng, j, ns=300):
    if chart == "hyperbolic":
        w = HyperbolicDiskWindow(1.5)
    else:
        w = BoxWindow(((0.0, 1.0), (0.0, 1.0)))
    locs = w.sample_locations(rng, ns * (j + 1)).reshape(ns, j + 1, -1)
    return locs


def test_constant_system_validation():
    with pytest.raises(ValueError):
        constant_system(2, (0.5,))
    with pytest.raises(ValueError):
        constant_system(1, (1.5,))
    sys = constant_system(2, (1.0, 0.0))
    locs = np.zeros((4, 2, 2))
    assert np.all(sys.evaluate(1, locs) == 1.0)


@pytest.mark.parametrize("name,system,chart", SHIPPED)
def test_symmetry_and_range(name, system, chart, rng):
    for j in range(1, system.alpha + 1):
        locs = _tuples(name, chart, rng, j)
        vals = system.evaluate(j, locs)
        assert np.all((vals >= 0.0) & (vals <= 1.0))
        perm = rng.permutation(j + 1)
        vals_p = system.evaluate(j, locs[:, perm, :])
        assert np.array_equal(vals, vals_p)


def test_cech_pair_threshold():
    r = 0.25
    sys = cech_system(2, r)
    locs = np.array(
        [
            [[0.0, 0.0], [2 * r, 0.0]],
            [[0.0, 0.0], [2 * r + 1e-9, 0.0]],
        ]
    )
    vals = sys.evaluate(1, locs)
    assert vals[0] == 1.0 and vals[1] == 0.0


def test_cech_equilateral_triangle_circumradius():
    r = 0.2
    sys = cech_system(2, r)

    def tri(side):
        return np.array([[0.0, 0.0], [side, 0.0], [side / 2, side * math.sqrt(3) / 2]])

    s_in = r * math.sqrt(3) * (1 - 1e-9)
    s_out = r * math.sqrt(3) * (1 + 1e-6)
    vals = sys.evaluate(2, np.stack([tri(s_in), tri(s_out)]))
    assert vals[0] == 1.0 and vals[1] == 0.0
    # brute-force a common point of the three balls for the inside case
    pts = tri(s_in)
    gx, gy = np.meshgrid(np.linspace(0.1, 0.25, 400), np.linspace(0.0, 0.15, 400))
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    dmax = np.max(
        np.sqrt(((grid[:, None, :] - pts[None, :, :]) ** 2).sum(-1)), axis=1
    )
    assert dmax.min() <= r + 1e-3


def test_welzl_matches_bruteforce(rng):
    from itertools import combinations

    def brute(pts):
        best = None
        k = len(pts)
        d = pts.shape[1]
        for size in range(1, min(k, d + 1) + 1):
            for sub in combinations(range(k), size):
                sub_pts = pts[list(sub)]
                u = sub_pts[1:] - sub_pts[0]
                if len(u):
                    gram = u @ u.T
                    if abs(np.linalg.det(gram)) < 1e-12:
                        continue
                    coef = np.linalg.solve(gram, 0.5 * (u * u).sum(1))
                    center = sub_pts[0] + coef @ u
                else:
                    center = sub_pts[0]
                radius = np.max(np.linalg.norm(pts - center, axis=1))
                if best is None or radius < best - 1e-12:
                    ok = np.max(np.linalg.norm(sub_pts - center, axis=1)) <= radius + 1e-9
                    if ok:
                        best = radius
        return best

    for trial in range(60):
        k = int(rng.integers(2, 7))
        pts = rng.random((k, 2))
        assert abs(smallest_enclosing_radius(pts) - brute(pts)) < 1e-7


def test_rips_examples(rng):
    r = 0.3
    sys = rips_system(2, r)
    side = r
    tri = np.array([[0.0, 0.0], [side, 0.0], [side / 2, side * math.sqrt(3) / 2]])
    assert sys.evaluate(2, tri[None]) == 1.0
    tri_out = tri * (1 + 1e-9)
    assert sys.evaluate(2, tri_out[None]) == 0.0
    # pairs: indicator of distance <= r
    locs = rng.random((500, 2, 2))
    d = np.linalg.norm(locs[:, 0] - locs[:, 1], axis=1)
    assert np.array_equal(sys.evaluate(1, locs), (d <= r).astype(float))


def test_rips_monotone_in_radius(rng):
    locs = rng.random((400, 3, 2))
    v_small = rips_system(2, 0.3).evaluate(2, locs)
    v_large = rips_system(2, 0.5).evaluate(2, locs)
    assert np.all(v_small <= v_large)


def test_hyperbolic_geometric_matches_rips_phi1(rng):
    r = 0.5
    sys = hyperbolic_geometric_system(2, r, (0.7,))
    w = HyperbolicDiskWindow(1.5)
    locs = w.sample_locations(rng, 400).reshape(200, 2, 2)
    d = hyperbolic_chart_distance(locs[:, 0], locs[:, 1])
    assert np.array_equal(sys.evaluate(1, locs), (d <= r).astype(float))
    assert np.all(sys.evaluate(2, rng.random((5, 3, 2))) == 0.7)


def test_hyperbolic_lines_same_ray_never_meet():
    sys = hyperbolic_line_system(0.5)
    # chart coordinates (t, phi): same angle, different radii
    locs = np.array([[[0.4, 1.0], [0.9, 1.0]]])
    assert sys.evaluate(1, locs) == 0.0


def test_hyperbolic_lines_near_diametral_tiny_radii_cross():
    sys = hyperbolic_line_system(0.5)
    # near-diametral lines at tiny radii cross near the origin ...
    for theta in (math.pi / 2, 2.5, 3.0):
        locs = np.array([[[0.05, 0.3], [0.05, 0.3 + theta]]])
        assert sys.evaluate(1, locs) == 1.0
    # ... but at separation exactly pi both are perpendicular to one
    # diameter, hence ultraparallel and disjoint
    locs = np.array([[[0.05, 0.3], [0.05, 0.3 + math.pi]]])
    assert sys.evaluate(1, locs) == 0.0


def test_hyperbolic_lines_symmetric(rng):
    sys = hyperbolic_line_system(0.5)
    w = HyperbolicDiskWindow(2.0)
    locs = w.sample_locations(rng, 600).reshape(300, 2, 2)
    forward = sys.evaluate(1, locs)
    backward = sys.evaluate(1, locs[:, ::-1, :])
    assert np.array_equal(forward, backward)
    assert set(np.unique(forward)) <= {0.0, 1.0}
    assert 0.0 < forward.mean() < 1.0


def test_hyperbolic_line_at_origin_is_zero(caplog):
    sys = hyperbolic_line_system(0.5)
    locs = np.array([[[0.0, 0.0], [0.5, 1.0]]])
    with caplog.at_level("WARNING"):
        assert sys.evaluate(1, locs) == 0.0
    assert any("origin" in rec.message for rec in caplog.records)


def test_stationary_translation_invariance(rng):
    radius = lambda a, b: 0.2 + 0.1 * (a + b)
    sys = stationary_marked_system(2, mark_radius_profile(radius, 0.4))
    locs = rng.random((1000, 3, 2))
    marks = rng.random((1000, 3))
    base = sys.evaluate(2, locs, marks)
    shifts = rng.normal(size=(1000, 1, 2))
    shifted = sys.evaluate(2, locs + shifts, marks)
    assert np.array_equal(base, shifted)


def test_stationary_single_point_marks_reduce_to_unmarked(rng):
    r0 = 0.25
    marked = stationary_marked_system(2, mark_radius_profile(lambda a, b: np.full_like(a, r0), r0))
    plain = stationary_indicator_system(2, r0)
    locs = rng.random((500, 3, 1))
    marks = np.zeros((500, 3))
    assert np.array_equal(marked.evaluate(2, locs, marks), plain.evaluate(2, locs, marks))


def test_indicator_profile_validation():
    with pytest.raises(ValueError):
        indicator_profile(0.0)
