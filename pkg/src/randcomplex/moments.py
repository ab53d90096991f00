"""Moment and covariance formulas via integral representations.

Every first/second moment of the model reduces to the integrals zeta over
template complexes generated by two overlapping simplices.  These are
estimated by plain Monte Carlo with reported standard errors (independent
RNG streams per template, so errors propagate through the closed-form sums
in quadrature).  For translation-invariant systems on large boxes a pinned
estimator keeps the variance bounded, and the same pinning evaluates the
stationary limits zeta(0), the sigma entries and the matrix Sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .complexes import build_complex
from .connect import ConnectionSystem
from .space import BoxWindow, MarkSpace, Window, sample_poisson

__all__ = [
    "MonteCarloEstimate",
    "ComplexTemplate",
    "zeta_template",
    "integral_representation",
    "zeta",
    "ZetaCache",
    "expected_count",
    "covariance_counts",
    "MomentReport",
    "euler_moments",
    "EmpiricalMoments",
    "replicate_counts",
    "empirical_moments",
    "zeta_window_pinned",
    "zeta_stationary_limit",
    "StationaryLimits",
    "stationary_limits",
    "integrability_nu",
    "IntegrabilityError",
]


class IntegrabilityError(RuntimeError):
    """Raised when a box-truncation sequence keeps growing instead of converging."""


@dataclass(frozen=True)
class MonteCarloEstimate:
    """A Monte Carlo value with its standard error and sample count."""

    value: float
    standard_error: float
    samples: int

    def scaled(self, c: float) -> "MonteCarloEstimate":
        return MonteCarloEstimate(c * self.value, abs(c) * self.standard_error, self.samples)

    def __add__(self, other: "MonteCarloEstimate") -> "MonteCarloEstimate":
        return MonteCarloEstimate(
            self.value + other.value,
            math.hypot(self.standard_error, other.standard_error),
            min(self.samples, other.samples),
        )


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _stream(seed, key: tuple[int, ...]) -> np.random.Generator:
    """Deterministic child stream for a tuple-valued key."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


# ---------------------------------------------------------------------------
# template complexes


@dataclass(frozen=True)
class ComplexTemplate:
    """A finite simplicial complex on vertices {0, ..., r-1} given by generators.

    The complex is the downward closure of the generators; isolated vertices
    are allowed as singleton generators.  The simplex function is the product
    of the connection functions over all faces with at least two vertices.
    """

    r: int
    generators: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        gens = tuple(tuple(sorted(set(int(v) for v in g))) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if self.r < 1:
            raise ValueError("template needs at least one vertex")
        if not gens:
            raise ValueError("template needs at least one generator")
        covered = set()
        for g in gens:
            if not g:
                raise ValueError("generators must be nonempty")
            if g[0] < 0 or g[-1] >= self.r:
                raise ValueError("generator vertex out of range")
            covered.update(g)
        if covered != set(range(self.r)):
            raise ValueError("every vertex must appear in some generator")

    @cached_property
    def faces_by_size(self) -> dict[int, np.ndarray]:
        faces: set[tuple[int, ...]] = set()
        for g in self.generators:
            for size in range(2, len(g) + 1):
                faces.update(combinations(g, size))
        out: dict[int, np.ndarray] = {}
        for size in sorted({len(f) for f in faces}):
            rows = sorted(f for f in faces if len(f) == size)
            out[size] = np.array(rows, dtype=np.int64)
        return out

    @property
    def dim(self) -> int:
        return max((len(g) for g in self.generators)) - 1

    @cached_property
    def connected_components(self) -> int:
        parent = list(range(self.r))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.generators:
            for v in g[1:]:
                parent[find(v)] = find(g[0])
        return len({find(v) for v in range(self.r)})

    @cached_property
    def pinned_distances(self) -> np.ndarray:
        """Graph distance of each vertex to vertex 0 in the 1-skeleton.

        Bounds the support of pinned integrals: on the support of the
        simplex function, vertex i lies within dist_i * max_range of the
        pinned vertex.  Unreachable vertices get -1.
        """
        adj = [set() for _ in range(self.r)]
        for g in self.generators:
            for u in g:
                adj[u].update(v for v in g if v != u)
        dist = np.full(self.r, -1, dtype=np.int64)
        dist[0] = 0
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        return dist

    def function_values(self, system: ConnectionSystem, locs: np.ndarray, marks: np.ndarray | None) -> np.ndarray:
        """Evaluate the simplex function on a batch of r-tuples."""
        if self.dim > system.alpha:
            raise ValueError("template dimension exceeds the system's alpha")
        ns = len(locs)
        vals = np.ones(ns)
        for size, faces in self.faces_by_size.items():
            nf = len(faces)
            sub = locs[:, faces.ravel(), :].reshape(ns * nf, size, locs.shape[-1])
            mk = None
            if marks is not None:
                mk = marks[:, faces.ravel()].reshape(ns * nf, size)
            vals *= system.evaluate(size - 1, sub, mk).reshape(ns, nf).prod(axis=1)
        return vals


def zeta_template(m: int, l: int, r: int) -> ComplexTemplate:
    """The template generated by an (m-1)- and an (l-1)-simplex sharing m+l-r vertices."""
    if not (1 <= m and 1 <= l):
        raise ValueError("m and l must be positive")
    if not max(m, l) <= r <= m + l:
        raise ValueError("need max(m, l) <= r <= m + l")
    first = tuple(range(m))
    second = tuple(range(m + l - r)) + tuple(range(m, r))
    return ComplexTemplate(r, (first, second))


# ---------------------------------------------------------------------------
# Monte Carlo core


def _adaptive_mc(draw, scale: float, samples: int, rel_target: float, max_samples: int) -> MonteCarloEstimate:
    total = 0
    s1 = 0.0
    s2 = 0.0
    batch = samples
    while True:
        v = draw(batch)
        total += len(v)
        s1 += float(v.sum())
        s2 += float((v * v).sum())
        mean = s1 / total
        var = max(s2 / total - mean * mean, 0.0) * total / max(total - 1, 1)
        se = scale * math.sqrt(var / total)
        value = scale * mean
        if se == 0.0 or se <= rel_target * abs(value) or total >= max_samples:
            return MonteCarloEstimate(value, se, total)
        batch = total


def _tuple_batch(window: Window, r: int, rng: np.random.Generator, nb: int):
    locs = window.sample_locations(rng, nb * r).reshape(nb, r, -1)
    marks = window.sample_marks(rng, nb * r)
    if marks is not None:
        marks = marks.reshape(nb, r)
    return locs, marks


def integral_representation(
    template: ComplexTemplate,
    window: Window,
    system: ConnectionSystem,
    samples: int = 20000,
    rng=None,
    rel_target: float = 0.01,
    max_factor: int = 16,
) -> MonteCarloEstimate:
    """Estimate I_K(W) = |W|^r * E f_K(U_1, ..., U_r) with i.i.d. uniforms in W.

    Sampling doubles adaptively until the relative standard error drops
    below ``rel_target`` or the budget ``samples * max_factor`` is spent.
    """
    if samples < 1000:
        raise ValueError("at least 1000 samples are required")
    rng = _as_rng(rng)
    scale = window.measure ** template.r

    def draw(nb):
        locs, marks = _tuple_batch(window, template.r, rng, nb)
        return template.function_values(system, locs, marks)

    return _adaptive_mc(draw, scale, samples, rel_target, samples * max_factor)


def zeta(
    m: int,
    l: int,
    r: int,
    window: Window,
    system: ConnectionSystem,
    samples: int = 20000,
    rng=None,
    **kw,
) -> MonteCarloEstimate:
    """The integral representation of the template K^r_{m,l} over the window."""
    if max(m, l) > system.alpha + 1:
        raise ValueError("m and l must not exceed alpha + 1")
    return integral_representation(zeta_template(m, l, r), window, system, samples, rng, **kw)


def zeta_window_pinned(
    m: int,
    l: int,
    r: int,
    window: BoxWindow,
    system: ConnectionSystem,
    samples: int = 20000,
    rng=None,
    halfwidth: float | None = None,
    rel_target: float = 0.01,
    max_factor: int = 16,
) -> MonteCarloEstimate:
    """Pinned estimator of zeta over a box for translation-invariant systems.

    Samples the first vertex uniformly in W and the rest as displacements in
    a finite box covering the support of the connected template; exact when
    the system has a finite interaction range.
    """
    if r > m + l - 1:
        raise ValueError("pinned estimator requires a connected template")
    if samples < 1000:
        raise ValueError("at least 1000 samples are required")
    template = zeta_template(m, l, r)
    if halfwidth is not None:
        widths = np.full(r - 1, float(halfwidth))
    else:
        if system.max_range is None:
            raise ValueError("halfwidth required for systems without a finite range")
        # exact truncation: vertex i stays within dist_i * range of the pin
        widths = template.pinned_distances[1:] * system.max_range
    rng = _as_rng(rng)
    d = window.dim
    scale = window.measure * float(np.prod((2.0 * widths) ** d))

    def draw(nb):
        x1 = window.sample_locations(rng, nb)
        disp = (rng.random((nb, r - 1, d)) - 0.5) * (2.0 * widths[None, :, None])
        locs = np.concatenate([x1[:, None, :], x1[:, None, :] + disp], axis=1)
        marks = window.sample_marks(rng, nb * r)
        if marks is not None:
            marks = marks.reshape(nb, r)
        vals = template.function_values(system, locs, marks)
        inside = window.contains(locs[:, 1:, :]).all(axis=1)
        return vals * inside

    return _adaptive_mc(draw, scale, samples, rel_target, samples * max_factor)


class ZetaCache:
    """Memoized zeta estimates over one window/system pair.

    Each (m, l, r) entry runs on its own deterministic RNG stream, so reused
    estimates are identical and distinct estimates are independent.
    """

    def __init__(
        self,
        window: Window,
        system: ConnectionSystem,
        samples: int = 20000,
        seed=0,
        rel_target: float = 0.01,
        max_factor: int = 16,
        estimator: str = "plain",
        halfwidth: float | None = None,
    ):
        if estimator not in ("plain", "pinned"):
            raise ValueError("estimator must be 'plain' or 'pinned'")
        self.window = window
        self.system = system
        self.samples = samples
        self.seed = seed
        self.rel_target = rel_target
        self.max_factor = max_factor
        self.estimator = estimator
        self.halfwidth = halfwidth
        self._store: dict[tuple[int, int, int], MonteCarloEstimate] = {}

    def get(self, m: int, l: int, r: int) -> MonteCarloEstimate:
        key = (min(m, l), max(m, l), r)
        if key not in self._store:
            rng = _stream(self.seed, key)
            if self.estimator == "pinned" and r <= m + l - 1:
                est = zeta_window_pinned(
                    key[0], key[1], r, self.window, self.system,
                    self.samples, rng, self.halfwidth, self.rel_target, self.max_factor,
                )
            else:
                est = zeta(
                    key[0], key[1], r, self.window, self.system,
                    self.samples, rng, rel_target=self.rel_target, max_factor=self.max_factor,
                )
            self._store[key] = est
        return self._store[key]


def _weighted_zeta_sum(cache: ZetaCache, coeffs: dict[tuple[int, int, int], float]) -> MonteCarloEstimate:
    value = 0.0
    var = 0.0
    count = None
    for (m, l, r), w in coeffs.items():
        est = cache.get(m, l, r)
        value += w * est.value
        var += (w * est.standard_error) ** 2
        count = est.samples if count is None else min(count, est.samples)
    return MonteCarloEstimate(value, math.sqrt(var), count or 0)


def _cov_coeffs(m: int, l: int, beta: float) -> dict[tuple[int, int, int], float]:
    out = {}
    for r in range(max(m, l), m + l):
        w = beta**r / (
            math.factorial(r - m) * math.factorial(r - l) * math.factorial(m + l - r)
        )
        out[(min(m, l), max(m, l), r)] = w
    return out


def expected_count(m: int, beta: float, window: Window, system: ConnectionSystem, cache: ZetaCache | None = None, **kw) -> MonteCarloEstimate:
    """E f_{m-1} = beta^m / m! * zeta^m_{m,m}(W)."""
    if not 1 <= m <= system.alpha + 1:
        raise ValueError("need 1 <= m <= alpha + 1")
    cache = cache or ZetaCache(window, system, **kw)
    return cache.get(m, m, m).scaled(beta**m / math.factorial(m))


def covariance_counts(m: int, l: int, beta: float, window: Window, system: ConnectionSystem, cache: ZetaCache | None = None, **kw) -> MonteCarloEstimate:
    """Cov(f_{m-1}, f_{l-1}) as the finite sum of weighted zeta estimates."""
    if not (1 <= m <= system.alpha + 1 and 1 <= l <= system.alpha + 1):
        raise ValueError("need 1 <= m, l <= alpha + 1")
    cache = cache or ZetaCache(window, system, **kw)
    return _weighted_zeta_sum(cache, _cov_coeffs(m, l, beta))


@dataclass
class MomentReport:
    """Closed-form moment values (as Monte Carlo estimates of the zeta sums).

    ``fock_components[k-1]`` is the k-indexed summand of the variance
    rewriting; the last one is the variance lower bound a_alpha^2 E f_alpha.
    Optionally carries the independent empirical estimates.
    """

    a: np.ndarray
    beta: float
    alpha: int
    mean: MonteCarloEstimate
    variance: MonteCarloEstimate
    variance_lower_bound: MonteCarloEstimate
    count_means: list[MonteCarloEstimate]
    count_covariances: dict[tuple[int, int], MonteCarloEstimate]
    fock_components: list[MonteCarloEstimate]
    empirical: "EmpiricalMoments | None" = None


def euler_moments(
    a,
    beta: float,
    window: Window,
    system: ConnectionSystem,
    cache: ZetaCache | None = None,
    empirical_replicates: int = 0,
    seed=0,
    **kw,
) -> MomentReport:
    """First two moments of chi_a plus the Fock-decomposition diagnostics."""
    a = np.asarray(a, dtype=float)
    alpha = system.alpha
    if len(a) != alpha + 1:
        raise ValueError("coefficient vector must have length alpha + 1")
    cache = cache or ZetaCache(window, system, seed=seed, **kw)

    mean_coeffs: dict[tuple[int, int, int], float] = {}
    for m in range(1, alpha + 2):
        if a[m - 1] != 0.0:
            mean_coeffs[(m, m, m)] = a[m - 1] * beta**m / math.factorial(m)
    mean = _weighted_zeta_sum(cache, mean_coeffs) if mean_coeffs else MonteCarloEstimate(0.0, 0.0, 0)

    var_coeffs: dict[tuple[int, int, int], float] = {}
    for m in range(1, alpha + 2):
        for l in range(1, alpha + 2):
            if a[m - 1] == 0.0 or a[l - 1] == 0.0:
                continue
            for key, w in _cov_coeffs(m, l, beta).items():
                var_coeffs[key] = var_coeffs.get(key, 0.0) + a[m - 1] * a[l - 1] * w
    variance = _weighted_zeta_sum(cache, var_coeffs) if var_coeffs else MonteCarloEstimate(0.0, 0.0, 0)

    fock = []
    for k in range(1, alpha + 2):
        coeffs: dict[tuple[int, int, int], float] = {}
        for m in range(k, alpha + 2):
            for l in range(k, alpha + 2):
                w = (
                    a[m - 1]
                    * a[l - 1]
                    * beta ** (m + l - k)
                    / (math.factorial(m - k) * math.factorial(l - k) * math.factorial(k))
                )
                if w != 0.0:
                    key = (min(m, l), max(m, l), m + l - k)
                    coeffs[key] = coeffs.get(key, 0.0) + w
        fock.append(_weighted_zeta_sum(cache, coeffs) if coeffs else MonteCarloEstimate(0.0, 0.0, 0))

    count_means = [expected_count(m, beta, window, system, cache) for m in range(1, alpha + 2)]
    count_covs = {
        (m, l): covariance_counts(m, l, beta, window, system, cache)
        for m in range(1, alpha + 2)
        for l in range(m, alpha + 2)
    }

    empirical = None
    if empirical_replicates > 0:
        empirical = empirical_moments(beta, window, system, empirical_replicates, seed=seed, a=a)

    return MomentReport(
        a=a,
        beta=beta,
        alpha=alpha,
        mean=mean,
        variance=variance,
        variance_lower_bound=fock[-1],
        count_means=count_means,
        count_covariances=count_covs,
        fock_components=fock,
        empirical=empirical,
    )


# ---------------------------------------------------------------------------
# empirical replication


def replicate_counts(
    beta: float,
    window: Window,
    system: ConnectionSystem,
    replicates: int,
    seed=0,
    threads: int = 1,
) -> np.ndarray:
    """f-vectors over independent realizations; shape (replicates, alpha + 1)."""
    seeds = np.random.SeedSequence(seed).spawn(replicates)

    def one(i):
        rng = np.random.default_rng(seeds[i])
        pts = sample_poisson(window, beta, rng)
        key = int(rng.integers(0, 1 << 63))
        return build_complex(pts, system, key).f_counts()

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(replicates)))
    else:
        rows = [one(i) for i in range(replicates)]
    return np.array(rows, dtype=np.int64)


@dataclass
class EmpiricalMoments:
    """Replication-based estimates of count moments and chi_a moments."""

    replicates: int
    counts_mean: np.ndarray
    counts_mean_se: np.ndarray
    counts_cov: np.ndarray
    counts_cov_se: np.ndarray
    chi_mean: float
    chi_mean_se: float
    chi_var: float
    chi_var_se: float


def empirical_moments(
    beta: float,
    window: Window,
    system: ConnectionSystem,
    replicates: int,
    seed=0,
    a=None,
    threads: int = 1,
    counts: np.ndarray | None = None,
) -> EmpiricalMoments:
    """Empirical mean/covariance of the count vector and of chi_a."""
    if counts is None:
        counts = replicate_counts(beta, window, system, replicates, seed, threads)
    counts = np.asarray(counts, dtype=float)
    n = len(counts)
    mean = counts.mean(axis=0)
    mean_se = counts.std(axis=0, ddof=1) / math.sqrt(n)
    centered = counts - mean
    prods = centered[:, :, None] * centered[:, None, :]
    cov = prods.mean(axis=0) * n / (n - 1)
    cov_se = prods.std(axis=0, ddof=1) / math.sqrt(n)
    if a is None:
        a = np.zeros(counts.shape[1])
        a[0] = 1.0
    chi = counts @ np.asarray(a, dtype=float)
    chi_c = chi - chi.mean()
    return EmpiricalMoments(
        replicates=n,
        counts_mean=mean,
        counts_mean_se=mean_se,
        counts_cov=cov,
        counts_cov_se=cov_se,
        chi_mean=float(chi.mean()),
        chi_mean_se=float(chi.std(ddof=1) / math.sqrt(n)),
        chi_var=float(chi.var(ddof=1)),
        chi_var_se=float((chi_c**2).std(ddof=1) / math.sqrt(n)),
    )


# ---------------------------------------------------------------------------
# stationary limits


def zeta_stationary_limit(
    m: int,
    l: int,
    r: int,
    system: ConnectionSystem,
    d: int,
    marks: MarkSpace | None = None,
    samples: int = 20000,
    rng=None,
    halfwidth: float | None = None,
    rel_target: float = 0.01,
    max_factor: int = 16,
    max_doublings: int = 8,
) -> MonteCarloEstimate:
    """zeta^r_{m,l}(0): the pinned integral with the first vertex at the origin.

    Connected templates only (r <= m + l - 1).  Systems with a finite
    interaction range use the exact truncation box; otherwise the box is
    doubled until the estimate stabilizes, and a diverging sequence raises
    IntegrabilityError.
    """
    if r > m + l - 1:
        raise ValueError("stationary limits exist for connected templates only")
    marks = marks or MarkSpace.point()
    rng = _as_rng(rng)
    template = zeta_template(m, l, r)

    if r == 1:
        return MonteCarloEstimate(1.0, 0.0, samples)

    def estimate(widths):
        widths = np.asarray(widths, dtype=float)
        scale = float(np.prod((2.0 * widths) ** d))

        def draw(nb):
            disp = (rng.random((nb, r - 1, d)) - 0.5) * (2.0 * widths[None, :, None])
            locs = np.concatenate([np.zeros((nb, 1, d)), disp], axis=1)
            mk = marks.sample(rng, nb * r).reshape(nb, r)
            return template.function_values(system, locs, mk)

        return _adaptive_mc(draw, scale, samples, rel_target, samples * max_factor)

    if halfwidth is None and system.max_range is not None:
        return estimate(template.pinned_distances[1:] * system.max_range)
    if halfwidth is not None:
        return estimate(np.full(r - 1, float(halfwidth)))

    h = 1.0
    prev = estimate(np.full(r - 1, h))
    for _ in range(max_doublings):
        h *= 2.0
        cur = estimate(np.full(r - 1, h))
        tol = 0.5 * math.hypot(prev.standard_error, cur.standard_error)
        if abs(cur.value - prev.value) <= max(tol, 1e-12):
            return cur
        prev = cur
    raise IntegrabilityError("truncation box estimates did not stabilize; profile may be non-integrable")


def _sigma_coeff(m: int, l: int, r: int, beta: float) -> float:
    return beta**r / (math.factorial(r - m) * math.factorial(r - l) * math.factorial(m + l - r))


@dataclass
class StationaryLimits:
    """Stationary zeta limits, the matrix Sigma, and finite-window ratios."""

    beta: float
    alpha: int
    zeta0: dict[tuple[int, int, int], MonteCarloEstimate]
    sigma: np.ndarray
    sigma_se: np.ndarray
    window_ratios: dict[tuple[int, int, int], list[tuple[float, MonteCarloEstimate]]] | None = None

    def sigma_entry(self, m: int, l: int) -> MonteCarloEstimate:
        return MonteCarloEstimate(self.sigma[m - 1, l - 1], self.sigma_se[m - 1, l - 1], 0)


def stationary_limits(
    system: ConnectionSystem,
    d: int,
    beta: float,
    marks: MarkSpace | None = None,
    samples: int = 20000,
    seed=0,
    windows: list[BoxWindow] | None = None,
    **kw,
) -> StationaryLimits:
    """Assemble zeta(0) estimates, sigma_{m,l} and the covariance matrix Sigma."""
    alpha = system.alpha
    zeta0: dict[tuple[int, int, int], MonteCarloEstimate] = {}
    for m in range(1, alpha + 2):
        for l in range(m, alpha + 2):
            for r in range(l, m + l):
                rng = _stream(seed, (m, l, r))
                zeta0[(m, l, r)] = zeta_stationary_limit(
                    m, l, r, system, d, marks, samples, rng, **kw
                )

    sigma = np.zeros((alpha + 1, alpha + 1))
    sigma_se = np.zeros((alpha + 1, alpha + 1))
    for m in range(1, alpha + 2):
        for l in range(1, alpha + 2):
            key_ml = (min(m, l), max(m, l))
            val = 0.0
            var = 0.0
            for r in range(max(m, l), m + l):
                est = zeta0[key_ml + (r,)]
                w = _sigma_coeff(m, l, r, beta)
                val += w * est.value
                var += (w * est.standard_error) ** 2
            sigma[m - 1, l - 1] = val
            sigma_se[m - 1, l - 1] = math.sqrt(var)

    ratios = None
    if windows:
        ratios = {}
        for (m, l, r), _ in zeta0.items():
            seq = []
            for i, w in enumerate(windows):
                rng = _stream(seed, (m, l, r, 1000 + i))
                est = zeta_window_pinned(m, l, r, w, system, samples, rng)
                seq.append((w.measure, est.scaled(1.0 / w.measure)))
            ratios[(m, l, r)] = seq

    return StationaryLimits(beta, alpha, zeta0, sigma, sigma_se, ratios)


def integrability_nu(
    system: ConnectionSystem,
    d: int,
    marks: MarkSpace | None = None,
    samples: int = 20000,
    seed=0,
    halfwidth: float | None = None,
    mark_probes: int = 16,
    max_doublings: int = 8,
    rel_target: float = 0.01,
    max_factor: int = 16,
) -> MonteCarloEstimate:
    """nu = sup_a integral of phi_1((0,a), (y,b))^(1/2) over y and b.

    The supremum is taken over a probe sample of marks; a diverging
    truncation sequence (e.g. a constant positive phi_1 on an unbounded
    space) raises IntegrabilityError.
    """
    marks = marks or MarkSpace.point()
    rng = _as_rng(np.random.SeedSequence(entropy=seed, spawn_key=(77,)))
    probes = marks.support_probe(rng, mark_probes)

    def estimate(a_value, h):
        scale = (2.0 * h) ** d

        def draw(nb):
            y = (rng.random((nb, d)) - 0.5) * (2.0 * h)
            locs = np.stack([np.zeros((nb, d)), y], axis=1)
            mk = np.column_stack([np.full(nb, a_value), marks.sample(rng, nb)])
            return np.sqrt(system.evaluate(1, locs, mk))

        return _adaptive_mc(draw, scale, samples, rel_target, samples * max_factor)

    if halfwidth is None and system.max_range is not None:
        halfwidth = system.max_range

    best: MonteCarloEstimate | None = None
    for a_value in probes:
        if halfwidth is not None:
            est = estimate(a_value, halfwidth)
        else:
            h = 1.0
            est = estimate(a_value, h)
            for _ in range(max_doublings):
                h *= 2.0
                nxt = estimate(a_value, h)
                tol = 3.0 * math.hypot(est.standard_error, nxt.standard_error)
                if abs(nxt.value - est.value) <= max(tol, 1e-12):
                    est = nxt
                    break
                est = nxt
            else:
                raise IntegrabilityError(
                    "integral of sqrt(phi_1) keeps growing with the truncation box"
                )
        if best is None or est.value > best.value:
            best = est
    return best
