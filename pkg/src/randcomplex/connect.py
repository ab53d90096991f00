"""Connection-function families and the named instances of the model.

A :class:`ConnectionSystem` bundles the maximal dimension ``alpha`` with one
symmetric function per dimension j in {1, ..., alpha} mapping (j+1)-tuples
of points to acceptance probabilities in [0, 1].  Functions are evaluated in
batches: ``locs`` has shape (ns, j+1, dim) and ``marks`` (ns, j+1) or None.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from .space import ball_from_chart, euclidean_distance, hyperbolic_chart_distance

__all__ = [
    "ConnectionSystem",
    "constant_system",
    "cech_system",
    "rips_system",
    "hyperbolic_geometric_system",
    "hyperbolic_line_system",
    "PairProfile",
    "indicator_profile",
    "mark_radius_profile",
    "stationary_marked_system",
    "stationary_indicator_system",
    "smallest_enclosing_radius",
]

log = logging.getLogger(__name__)

PhiFunction = Callable[[np.ndarray, np.ndarray | None], np.ndarray]


@dataclass(frozen=True)
class ConnectionSystem:
    """The family phi_1, ..., phi_alpha of connection functions.

    ``max_range`` is an optional guarantee that phi_1 vanishes whenever the
    Euclidean distance of the pair exceeds it, enabling neighbor pruning
    during complex construction.  phi_0 == 1 is implicit.
    """

    alpha: int
    phis: tuple[PhiFunction, ...]
    max_range: float | None = None
    label: str = "custom"

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be at least 1")
        if len(self.phis) != self.alpha:
            raise ValueError("need exactly alpha connection functions")

    def evaluate(self, j: int, locs: np.ndarray, marks: np.ndarray | None = None) -> np.ndarray:
        """Evaluate phi_j on a batch of (j+1)-tuples."""
        if not 1 <= j <= self.alpha:
            raise ValueError(f"dimension {j} outside 1..{self.alpha}")
        locs = np.asarray(locs, dtype=float)
        if locs.ndim != 3 or locs.shape[1] != j + 1:
            raise ValueError(f"expected batch of {j + 1}-tuples")
        out = np.asarray(self.phis[j - 1](locs, marks), dtype=float)
        return out


def _pair_indices(t: int) -> list[tuple[int, int]]:
    return list(combinations(range(t), 2))


# ---------------------------------------------------------------------------
# constant systems


def constant_system(alpha: int, p) -> ConnectionSystem:
    """phi_j == p_j for a vector of alpha probabilities."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if len(p) != alpha:
        raise ValueError("need one probability per dimension")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("probabilities must lie in [0, 1]")

    def make(value):
        def phi(locs, marks=None):
            return np.full(len(locs), value)

        return phi

    return ConnectionSystem(alpha, tuple(make(v) for v in p), None, "constant")


# ---------------------------------------------------------------------------
# Cech and Vietoris-Rips systems


def _circumball_radius(pts: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest sphere with all of ``pts`` on its boundary (center, radius)."""
    if len(pts) == 1:
        return pts[0], 0.0
    u = pts[1:] - pts[0]
    gram = u @ u.T
    rhs = 0.5 * np.sum(u * u, axis=1)
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        coef, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    center = pts[0] + coef @ u
    return center, float(np.linalg.norm(center - pts[0]))


def smallest_enclosing_radius(pts: np.ndarray) -> float:
    """Radius of the smallest enclosing ball (Welzl's algorithm).

    Intended for the tiny tuples of the Cech system; input order does not
    affect the result, which is unique.
    """
    pts = np.asarray(pts, dtype=float)
    d = pts.shape[1]
    # canonical order makes the float result permutation invariant
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]

    def welzl(p_idx: list[int], r_pts: list[np.ndarray]):
        if not p_idx or len(r_pts) == d + 1:
            if not r_pts:
                return np.zeros(d), 0.0
            return _circumball_radius(np.array(r_pts))
        head, rest = p_idx[0], p_idx[1:]
        center, radius = welzl(rest, r_pts)
        if np.linalg.norm(pts[head] - center) <= radius * (1.0 + 1e-12) + 1e-300:
            return center, radius
        return welzl(rest, r_pts + [pts[head]])

    _, radius = welzl(list(range(len(pts))), [])
    return radius


def _triangle_miniball_radius(locs: np.ndarray) -> np.ndarray:
    """Vectorized smallest-enclosing-ball radius of point triples."""
    a = euclidean_distance(locs[:, 1, :], locs[:, 2, :])
    b = euclidean_distance(locs[:, 0, :], locs[:, 2, :])
    c = euclidean_distance(locs[:, 0, :], locs[:, 1, :])
    sides = np.sort(np.stack([a, b, c], axis=-1), axis=-1)
    obtuse = sides[:, 2] ** 2 >= sides[:, 0] ** 2 + sides[:, 1] ** 2
    s = 0.5 * (a + b + c)
    area_sq = np.maximum(s * (s - a) * (s - b) * (s - c), 1e-300)
    circum = a * b * c / (4.0 * np.sqrt(area_sq))
    return np.where(obtuse, 0.5 * sides[:, 2], circum)


def cech_system(alpha: int, r: float) -> ConnectionSystem:
    """Indicator that the j+1 closed balls of radius r share a common point.

    Implemented for Euclidean coordinates via the smallest enclosing ball:
    the balls intersect iff the miniball radius is at most r.  Pairs and
    triples use closed forms; larger tuples run Welzl's algorithm.
    """
    if r <= 0:
        raise ValueError("radius must be positive")

    def make(j):
        def phi(locs, marks=None):
            if j == 1:
                d = euclidean_distance(locs[:, 0, :], locs[:, 1, :])
                return (d <= 2.0 * r).astype(float)
            if j == 2:
                return (_triangle_miniball_radius(locs) <= r).astype(float)
            out = np.empty(len(locs))
            for i, tup in enumerate(locs):
                out[i] = 1.0 if smallest_enclosing_radius(tup) <= r else 0.0
            return out

        return phi

    return ConnectionSystem(alpha, tuple(make(j) for j in range(1, alpha + 1)), 2.0 * r, "cech")


def rips_system(alpha: int, r: float, metric=euclidean_distance) -> ConnectionSystem:
    """Indicator that all pairwise distances are at most r.

    ``metric`` is the space's distance on chart coordinates; pass
    ``hyperbolic_chart_distance`` for the hyperbolic disk.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    prune = r if metric is euclidean_distance else None

    def make(j):
        pairs = _pair_indices(j + 1)

        def phi(locs, marks=None):
            ok = np.ones(len(locs), dtype=bool)
            for u, v in pairs:
                ok &= metric(locs[:, u, :], locs[:, v, :]) <= r
            return ok.astype(float)

        return phi

    return ConnectionSystem(alpha, tuple(make(j) for j in range(1, alpha + 1)), prune, "rips")


def hyperbolic_geometric_system(alpha: int, r: float, p) -> ConnectionSystem:
    """Hyperbolic-distance graph with constant higher probabilities.

    phi_1(x, y) = 1{d_h(x, y) <= r}; phi_j == p_j for j >= 2.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if len(p) != alpha - 1:
        raise ValueError("need alpha - 1 constant probabilities")
    base = rips_system(1, r, metric=hyperbolic_chart_distance)

    def make_const(value):
        def phi(locs, marks=None):
            return np.full(len(locs), value)

        return phi

    phis = (base.phis[0],) + tuple(make_const(v) for v in p)
    return ConnectionSystem(alpha, phis, None, "hyperbolic_geometric")


# ---------------------------------------------------------------------------
# hyperbolic line process


def _line_circles(locs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Euclidean circle (center, radius) of the geodesic H(z) for chart points.

    H(z) is the unique hyperbolic line whose closest point to the origin is
    z; in the Poincare model it is the circle orthogonal to the unit circle
    crossing the ray through z perpendicularly at z.  Undefined at z = 0.
    """
    ball = ball_from_chart(locs)
    rho = np.linalg.norm(ball, axis=-1)
    degenerate = rho < 1e-15
    safe = np.where(degenerate, 1.0, rho)
    s = (1.0 + safe**2) / (2.0 * safe)
    radius = (1.0 - safe**2) / (2.0 * safe)
    centers = ball * (s / safe)[..., None]
    return centers, radius, degenerate


def hyperbolic_line_system(p: float) -> ConnectionSystem:
    """Line-process system: phi_1 = 1{H(x) and H(y) meet}, phi_2 == p.

    Geodesics are intersected as Euclidean circles in the Poincare model;
    the crossing must lie strictly inside the unit disk (tolerance 1e-12).
    Points at the origin have no associated line; phi is 0 there and a
    warning is logged.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")

    def phi1(locs, marks=None):
        c1, r1, bad1 = _line_circles(locs[:, 0, :])
        c2, r2, bad2 = _line_circles(locs[:, 1, :])
        bad = bad1 | bad2
        if np.any(bad):
            log.warning("hyperbolic line undefined at the origin; returning 0")
        diff = c2 - c1
        d = np.linalg.norm(diff, axis=-1)
        separated = (d > r1 + r2) | (d < np.abs(r1 - r2)) | (d < 1e-15)
        dd = np.where(d < 1e-15, 1.0, d)
        a = (dd**2 + r1**2 - r2**2) / (2.0 * dd)
        h = np.sqrt(np.maximum(r1**2 - a**2, 0.0))
        base = c1 + diff * (a / dd)[..., None]
        perp = np.stack([-diff[..., 1], diff[..., 0]], axis=-1) / dd[..., None]
        w1 = base + perp * h[..., None]
        w2 = base - perp * h[..., None]
        inside = np.minimum(np.linalg.norm(w1, axis=-1), np.linalg.norm(w2, axis=-1)) < 1.0 - 1e-12
        return (~bad & ~separated & inside).astype(float)

    def phi2(locs, marks=None):
        return np.full(len(locs), float(p))

    return ConnectionSystem(2, (phi1, phi2), None, "hyperbolic_lines")


# ---------------------------------------------------------------------------
# marked stationary systems


@dataclass(frozen=True)
class PairProfile:
    """Translation-invariant pair interaction for the marked stationary case.

    ``func(disp, a, b)`` maps displacement vectors (ns, d) and the two mark
    arrays to values in [0, 1]; it must be symmetric under swapping the
    endpoints, i.e. func(-disp, b, a) == func(disp, a, b).  ``max_range``
    bounds the support of the displacement when finite.
    """

    func: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    max_range: float | None = None


def indicator_profile(r0: float) -> PairProfile:
    """1{||x - y|| <= r0}, ignoring marks."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")

    def func(disp, a, b):
        return (np.linalg.norm(disp, axis=-1) <= r0).astype(float)

    return PairProfile(func, r0)


def mark_radius_profile(radius_fn: Callable[[np.ndarray, np.ndarray], np.ndarray], max_range: float) -> PairProfile:
    """1{||x - y|| <= r(a, b)} with a symmetric mark-dependent radius."""

    def func(disp, a, b):
        return (np.linalg.norm(disp, axis=-1) <= radius_fn(a, b)).astype(float)

    return PairProfile(func, max_range)


def stationary_marked_system(alpha: int, profile: PairProfile) -> ConnectionSystem:
    """Build phi_j as the product of the pair profile over all pairs.

    Depends only on displacements and marks, so translation invariance
    holds by construction; indicator profiles give the mark-dependent
    Rips complex.
    """

    def make(j):
        pairs = _pair_indices(j + 1)

        def phi(locs, marks=None):
            ns = len(locs)
            if marks is None:
                marks = np.zeros(locs.shape[:2])
            out = np.ones(ns)
            for u, v in pairs:
                out *= profile.func(locs[:, u, :] - locs[:, v, :], marks[:, u], marks[:, v])
            return out

        return phi

    return ConnectionSystem(
        alpha, tuple(make(j) for j in range(1, alpha + 1)), profile.max_range, "stationary"
    )


def stationary_indicator_system(alpha: int, r0: float) -> ConnectionSystem:
    """Unmarked stationary indicator system: the Rips complex at radius r0."""
    return stationary_marked_system(alpha, indicator_profile(r0))
