"""Sampling spaces, observation windows, and Poisson point samples.

Three concrete vertex spaces are provided:

* an axis-aligned Euclidean box,
* a hyperbolic disk in the Poincare ball model with a radial intensity
  density (``cosh`` by default),
* a marked stationary box, i.e. a Euclidean box whose points carry
  i.i.d. marks from a pluggable mark distribution.

Every point receives an auxiliary uniform ``order_key``; the pair
``(order_key, index)`` is a strict total order on the points of a sample
and doubles as the stable identity used to derive simplex marks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._mixing import point_idents

__all__ = [
    "MarkSpace",
    "BoxWindow",
    "HyperbolicDiskWindow",
    "Window",
    "Point",
    "PointSample",
    "measure",
    "inradius",
    "sample_poisson",
    "attach_points",
    "euclidean_distance",
    "hyperbolic_distance",
    "hyperbolic_chart_distance",
    "ball_from_chart",
]


# ---------------------------------------------------------------------------
# marks


@dataclass(frozen=True)
class MarkSpace:
    """A probability distribution over a scalar mark space.

    Shipped kinds: ``point`` (single atom, the unmarked case), ``uniform``
    (uniform on [0, 1]) and ``discrete`` (finite support with weights).
    """

    kind: str = "point"
    values: tuple[float, ...] = (0.0,)
    probs: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.kind not in ("point", "uniform", "discrete"):
            raise ValueError(f"unknown mark space kind {self.kind!r}")
        if self.kind == "discrete":
            if len(self.values) != len(self.probs):
                raise ValueError("values and probs must have equal length")
            if abs(sum(self.probs) - 1.0) > 1e-12 or min(self.probs) < 0:
                raise ValueError("probs must be a probability vector")

    @classmethod
    def point(cls) -> "MarkSpace":
        return cls()

    @classmethod
    def uniform(cls) -> "MarkSpace":
        return cls(kind="uniform")

    @classmethod
    def discrete(cls, values: Sequence[float], probs: Sequence[float]) -> "MarkSpace":
        return cls(kind="discrete", values=tuple(values), probs=tuple(probs))

    @property
    def trivial(self) -> bool:
        return self.kind == "point" or (self.kind == "discrete" and len(self.values) == 1)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "point":
            return np.full(n, self.values[0])
        if self.kind == "uniform":
            return rng.random(n)
        return rng.choice(np.asarray(self.values, dtype=float), size=n, p=self.probs)

    def support_probe(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Representative marks used when maximizing over the mark space."""
        if self.kind == "point":
            return np.array([self.values[0]])
        if self.kind == "discrete":
            return np.asarray(self.values, dtype=float)
        return rng.random(n)


# ---------------------------------------------------------------------------
# metrics


def euclidean_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Euclidean distance along the last axis, broadcasting."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sqrt(np.sum((x - y) ** 2, axis=-1))


def hyperbolic_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Hyperbolic distance between points of the open Poincare unit ball.

    Raises ValueError if any point has Euclidean norm >= 1.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nx = np.sum(x**2, axis=-1)
    ny = np.sum(y**2, axis=-1)
    if np.any(nx >= 1.0) or np.any(ny >= 1.0):
        raise ValueError("points must lie strictly inside the unit ball")
    d2 = np.sum((x - y) ** 2, axis=-1)
    arg = 1.0 + 2.0 * d2 / ((1.0 - nx) * (1.0 - ny))
    return np.arccosh(np.maximum(arg, 1.0))


def hyperbolic_chart_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hyperbolic distance in the radial chart (t, phi) via the law of cosines."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t1, p1 = a[..., 0], a[..., 1]
    t2, p2 = b[..., 0], b[..., 1]
    arg = np.cosh(t1) * np.cosh(t2) - np.sinh(t1) * np.sinh(t2) * np.cos(p1 - p2)
    return np.arccosh(np.maximum(arg, 1.0))


def ball_from_chart(locs: np.ndarray) -> np.ndarray:
    """Convert chart coordinates (t, phi) to Poincare ball coordinates."""
    locs = np.asarray(locs, dtype=float)
    rho = np.tanh(locs[..., 0] / 2.0)
    return np.stack([rho * np.cos(locs[..., 1]), rho * np.sin(locs[..., 1])], axis=-1)


# ---------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class BoxWindow:
    """Axis-aligned box observation window, optionally with marked points.

    For a plain box the intensity is Lebesgue measure; with a nontrivial
    ``marks`` distribution the window models the marked stationary space
    R^d x A with intensity Lebesgue x Theta.
    """

    bounds: tuple[tuple[float, float], ...]
    marks: MarkSpace | None = None

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        for lo, hi in bounds:
            if hi < lo:
                raise ValueError("box bounds must satisfy lo <= hi")

    chart = "euclidean"
    metric = staticmethod(euclidean_distance)

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def measure(self) -> float:
        return float(np.prod([hi - lo for lo, hi in self.bounds]))

    @property
    def inradius(self) -> float:
        return 0.5 * min(hi - lo for lo, hi in self.bounds)

    def sample_locations(self, rng: np.random.Generator, n: int) -> np.ndarray:
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return lo + rng.random((n, self.dim)) * (hi - lo)

    def sample_marks(self, rng: np.random.Generator, n: int) -> np.ndarray | None:
        if self.marks is None:
            return None
        return self.marks.sample(rng, n)

    def contains(self, locs: np.ndarray) -> np.ndarray:
        locs = np.asarray(locs, dtype=float)
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return np.all((locs >= lo) & (locs <= hi), axis=-1)


@dataclass(frozen=True)
class HyperbolicDiskWindow:
    """Hyperbolic disk of radius R with a configurable radial intensity.

    The default radial density ``cosh`` follows the hyperbolic examples and
    yields |W| = sinh(R); choosing ``sinh`` gives the hyperbolic area
    element with |W| = cosh(R) - 1.  Locations are stored in the chart
    (t, phi); use :func:`ball_from_chart` for Poincare coordinates.
    """

    radius: float
    radial_density: str = "cosh"

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if self.radial_density not in ("cosh", "sinh"):
            raise ValueError("radial_density must be 'cosh' or 'sinh'")

    chart = "hyperbolic"
    metric = staticmethod(hyperbolic_chart_distance)
    dim = 2

    @property
    def measure(self) -> float:
        if self.radial_density == "cosh":
            return math.sinh(self.radius)
        return math.cosh(self.radius) - 1.0

    def sample_locations(self, rng: np.random.Generator, n: int) -> np.ndarray:
        u = rng.random(n)
        if self.radial_density == "cosh":
            # radial CDF sinh(t)/sinh(R)
            t = np.arcsinh(u * math.sinh(self.radius))
        else:
            # radial CDF (cosh(t)-1)/(cosh(R)-1)
            t = np.arccosh(1.0 + u * (math.cosh(self.radius) - 1.0))
        phi = rng.random(n) * 2.0 * math.pi
        return np.column_stack([t, phi])

    def sample_marks(self, rng: np.random.Generator, n: int) -> None:
        return None


Window = BoxWindow | HyperbolicDiskWindow


def measure(window: Window) -> float:
    """Total intensity mass |W| of an observation window."""
    return window.measure


def inradius(window: Window) -> float:
    """Inradius r(W); defined for Euclidean boxes."""
    if not isinstance(window, BoxWindow):
        raise TypeError("inradius is defined for box windows only")
    return window.inradius


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class Point:
    """A vertex: location in the space's chart, optional mark, order key."""

    location: tuple[float, ...]
    order_key: float
    index: int
    mark: float | None = None

    @property
    def ident(self) -> int:
        return int(point_idents(np.array([self.order_key]), np.array([self.index]))[0])

    def sort_key(self) -> tuple[float, int]:
        return (self.order_key, self.index)


class PointSample(Sequence):
    """An immutable batch of points stored as parallel arrays.

    Behaves as a sequence of :class:`Point` while exposing the raw arrays
    (``locations``, ``order_keys``, ``indices``, ``marks``, ``idents``)
    for vectorized work.
    """

    __slots__ = ("locations", "order_keys", "indices", "marks", "idents", "chart")

    def __init__(
        self,
        locations: np.ndarray,
        order_keys: np.ndarray,
        indices: np.ndarray,
        marks: np.ndarray | None = None,
        chart: str = "euclidean",
    ):
        locations = np.atleast_2d(np.asarray(locations, dtype=float))
        self.locations = locations
        self.order_keys = np.asarray(order_keys, dtype=float)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.marks = None if marks is None else np.asarray(marks, dtype=float)
        self.chart = chart
        if len(self.order_keys) != len(locations) or len(self.indices) != len(locations):
            raise ValueError("mismatched array lengths")
        self.idents = point_idents(self.order_keys, self.indices)

    @classmethod
    def from_points(cls, points: Iterable[Point], chart: str = "euclidean") -> "PointSample":
        pts = list(points)
        if not pts:
            return cls(np.empty((0, 1)), np.empty(0), np.empty(0, dtype=np.int64), None, chart)
        marks = None
        if pts[0].mark is not None:
            marks = np.array([p.mark for p in pts])
        return cls(
            np.array([p.location for p in pts], dtype=float),
            np.array([p.order_key for p in pts]),
            np.array([p.index for p in pts], dtype=np.int64),
            marks,
            chart,
        )

    def __len__(self) -> int:
        return len(self.order_keys)

    def __getitem__(self, i: int) -> Point:
        if isinstance(i, slice):
            raise TypeError("PointSample does not support slicing")
        mark = None if self.marks is None else float(self.marks[i])
        return Point(
            location=tuple(self.locations[i]),
            order_key=float(self.order_keys[i]),
            index=int(self.indices[i]),
            mark=mark,
        )

    def concat(self, other: "PointSample") -> "PointSample":
        if self.chart != other.chart:
            raise ValueError("cannot concatenate samples from different charts")
        if (self.marks is None) != (other.marks is None):
            raise ValueError("cannot mix marked and unmarked samples")
        marks = None if self.marks is None else np.concatenate([self.marks, other.marks])
        return PointSample(
            np.vstack([self.locations, other.locations]) if len(other) else self.locations,
            np.concatenate([self.order_keys, other.order_keys]),
            np.concatenate([self.indices, other.indices]),
            marks,
            self.chart,
        )

    def sorted_order(self) -> np.ndarray:
        """Indices sorting the sample by the strict total order (order_key, index)."""
        return np.lexsort((self.indices, self.order_keys))


def as_point_sample(points, chart: str | None = None) -> PointSample:
    if isinstance(points, PointSample):
        return points
    return PointSample.from_points(points, chart=chart or "euclidean")


def sample_poisson(window: Window, beta: float, rng: np.random.Generator) -> PointSample:
    """Draw one realization of the Poisson process with intensity beta * lambda_W.

    The point count is Poisson(beta |W|), locations are i.i.d. lambda_W/|W|,
    and each point gets an independent uniform order key.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    mass = window.measure
    if mass <= 0:
        raise ValueError("window must have positive measure")
    n = int(rng.poisson(beta * mass))
    locations = window.sample_locations(rng, n)
    marks = window.sample_marks(rng, n)
    order_keys = rng.random(n)
    return PointSample(locations, order_keys, np.arange(n), marks, window.chart)


def attach_points(
    window: Window,
    locations: np.ndarray,
    rng: np.random.Generator,
    start_index: int = 1 << 32,
    marks: np.ndarray | None = None,
) -> PointSample:
    """Wrap fixed locations as points with fresh order keys.

    Used for the extra points of augmented complexes; the default index
    base keeps their identities disjoint from any sampled points.
    """
    locations = np.atleast_2d(np.asarray(locations, dtype=float))
    n = len(locations)
    if marks is None and isinstance(window, BoxWindow) and window.marks is not None:
        marks = window.marks.sample(rng, n)
    return PointSample(
        locations,
        rng.random(n),
        start_index + np.arange(n),
        marks,
        window.chart,
    )
