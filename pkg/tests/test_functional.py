import math

import numpy as np
import pytest

from randcomplex import (
    attach_points,
    build_augmented,
    build_complex,
    cech_system,
    constant_system,
    euler_characteristic,
    euler_coefficients,
    euler_lambda,
    lambda_operator,
    restricted_counts,
    rips_system,
    sample_poisson,
    simplex_counts,
)
from randcomplex.space import PointSample


def empty_sample():
    pts = PointSample(np.empty((0, 2)), np.empty(0), np.empty(0, dtype=np.int64))
    return build_complex(pts, constant_system(2, (0.5, 0.5)), 0)


def test_counts_empty_and_full(rng, unit_square):
    assert list(simplex_counts(empty_sample())) == [0, 0, 0]
    pts = sample_poisson(unit_square, 5.0, rng)
    n = len(pts)
    c = build_complex(pts, constant_system(2, (1.0, 1.0)), 0)
    assert list(simplex_counts(c)) == [n, math.comb(n, 2), math.comb(n, 3)]


def test_euler_characteristic_basics(rng, unit_square):
    pts = sample_poisson(unit_square, 10.0, rng)
    c = build_complex(pts, constant_system(2, (0.5, 0.5)), 1)
    f = simplex_counts(c)
    assert euler_characteristic(c, [1, -1, 1]) == f[0] - f[1] + f[2]
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        assert euler_characteristic(c, e) == f[j]
    assert euler_characteristic(empty_sample(), [1, -1, 1]) == 0.0
    with pytest.raises(ValueError):
        euler_characteristic(c, [1, -1])
    assert list(euler_coefficients(2)) == [1.0, -1.0, 1.0]


def test_restricted_counts_examples(rng, unit_square):
    pts = sample_poisson(unit_square, 10.0, rng)
    n = len(pts)
    added = attach_points(unit_square, [[0.5, 0.5]], rng)
    aug = build_augmented(pts, added, {0}, constant_system(2, (1.0, 1.0)), 3)
    # full skeleton: the added point meets n edges and C(n, 2) triangles
    assert restricted_counts(aug, [0], 1) == n
    assert restricted_counts(aug, [0], 2) == math.comb(n, 2)
    # empty requirement gives plain counts of the retained complex
    assert restricted_counts(aug, [], 1) == math.comb(n + 1, 2)
    # a simplex cannot contain more points than it has vertices
    assert restricted_counts(aug, [0], 0) == 1
    with pytest.raises(ValueError):
        restricted_counts(aug, [3], 1)


def test_restricted_counts_too_small_dimension(rng, unit_square):
    pts = sample_poisson(unit_square, 5.0, rng)
    added = attach_points(unit_square, rng.random((2, 2)), rng)
    aug = build_augmented(pts, added, {0, 1}, constant_system(2, (1.0, 1.0)), 3)
    assert restricted_counts(aug, [0, 1], 0) == 0


def test_lambda_one_vertex_count(rng, unit_square):
    pts = sample_poisson(unit_square, 8.0, rng)
    added = attach_points(unit_square, rng.random((2, 2)), rng)
    aug = build_augmented(pts, added, {0, 1}, constant_system(2, (0.3, 0.9)), 5)
    f0 = lambda c: float(simplex_counts(c)[0])
    assert lambda_operator(aug, 1, f0) == 1.0


def test_lambda_vanishes_on_constants(rng, unit_square):
    pts = sample_poisson(unit_square, 8.0, rng)
    added = attach_points(unit_square, rng.random((3, 2)), rng)
    aug = build_augmented(pts, added, {0, 1, 2}, constant_system(2, (0.5, 0.5)), 5)
    const = lambda c: 42.0
    for k in (1, 2, 3):
        assert lambda_operator(aug, k, const) == 0.0


def test_lambda_linearity(rng, unit_square):
    pts = sample_poisson(unit_square, 8.0, rng)
    added = attach_points(unit_square, rng.random((2, 2)), rng)
    aug = build_augmented(pts, added, {0, 1}, constant_system(2, (0.6, 0.4)), 5)
    f = lambda c: euler_characteristic(c, [1.0, -1.0, 1.0])
    g = lambda c: float(simplex_counts(c)[1])
    combo = lambda c: 2.0 * f(c) - 3.0 * g(c)
    for k in (1, 2):
        lhs = lambda_operator(aug, k, combo)
        rhs = 2.0 * lambda_operator(aug, k, f) - 3.0 * lambda_operator(aug, k, g)
        assert lhs == rhs


def test_lemma_identity_exact(rng, unit_square):
    """Alternating sum equals the weighted restricted counts, exactly."""
    systems = [
        constant_system(2, (0.4, 0.6)),
        constant_system(3, (0.6, 0.7, 0.8)),
        rips_system(2, 0.4),
        cech_system(2, 0.3),
    ]
    for trial in range(20):
        system = systems[trial % len(systems)]
        alpha = system.alpha
        a = rng.integers(-3, 4, size=alpha + 1).astype(float)
        pts = sample_poisson(unit_square, 12.0, rng)
        for k in (1, 2):
            for l in range(k, k + 3):
                added = attach_points(unit_square, rng.random((l, 2)), rng)
                aug = build_augmented(pts, added, range(l), system, int(rng.integers(1 << 62)))
                chi = lambda c: euler_characteristic(c, a)
                assert lambda_operator(aug, k, chi) == euler_lambda(aug, range(k), a)


def test_restricted_count_binomial_bound(rng, unit_square):
    pts = sample_poisson(unit_square, 20.0, rng)
    tau = len(pts)
    added = attach_points(unit_square, rng.random((2, 2)), rng)
    aug = build_augmented(pts, added, {0, 1}, constant_system(2, (0.8, 0.8)), 9)
    for k, req in [(1, [0]), (2, [0, 1])]:
        for i in range(aug.full.alpha + 1):
            if i + 1 >= k:
                assert restricted_counts(aug, req, i) <= math.comb(tau + 2, i + 1 - k)
