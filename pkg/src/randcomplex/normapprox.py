"""Normal-approximation bounds and central limit theorem experiments.

The six gamma quantities bounding the Wasserstein/Kolmogorov distance of the
standardized functional to the standard normal are estimated by nested Monte
Carlo: an outer sample of added-point tuples in the window, and for each
tuple an inner pool of fresh realizations on which difference-operator
values are evaluated through the coupled augmented build.  Expectations that
the bound splits by Holder's inequality are averaged over separate halves of
the inner pool.  Standard errors come from the outer sample spread and are
pushed through the outer square roots by a symmetric finite-difference delta
method; they are approximate confidence intervals, not exact ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import chain, combinations

import numpy as np
from scipy.stats import norm

from .complexes import build_augmented, build_complex
from .connect import ConnectionSystem
from .functional import euler_lambda
from .moments import (
    IntegrabilityError,
    MomentReport,
    MonteCarloEstimate,
    StationaryLimits,
    ZetaCache,
    covariance_counts,
    empirical_moments,
    euler_moments,
    integrability_nu,
    replicate_counts,
    stationary_limits,
    _stream,
)
from .space import MarkSpace, Window, attach_points, sample_poisson

__all__ = [
    "GammaReport",
    "gamma_quantities",
    "empirical_kolmogorov",
    "standardized_euler_pool",
    "CltExperiment",
    "RungResult",
    "LadderReport",
    "run_clt_experiment",
    "fit_loglog_slope",
    "HypothesisError",
]


class HypothesisError(RuntimeError):
    """A regime hypothesis check failed; the experiment aborts with diagnostics."""


_ACTIVE_SETS = [(0,), (1,), (0, 2), (1, 2), (0, 1)]


def _subseed(seed, key) -> int:
    return int(_stream(seed, key).integers(0, 1 << 62))


@dataclass
class GammaReport:
    """Estimates of gamma_1..gamma_6 and the derived distance bounds."""

    beta: float
    alpha: int
    gammas: tuple[MonteCarloEstimate, ...]
    wasserstein_bound: MonteCarloEstimate
    kolmogorov_bound: MonteCarloEstimate
    fourth_moment: MonteCarloEstimate
    fourth_moment_bound: float
    mean: float
    sd: float
    outer_samples: int
    inner_replicates: int

    def gamma_values(self) -> np.ndarray:
        return np.array([g.value for g in self.gammas])


def _subsets(items):
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def _euler_evaluator(a):
    def ev(aug):
        return [euler_lambda(aug, act, a) for act in _ACTIVE_SETS]

    return ev


def _generic_evaluator(functional):
    def ev(aug):
        out = []
        for act in _ACTIVE_SETS:
            total = 0.0
            for sub in _subsets(act):
                total += (-1.0) ** (len(act) - len(sub)) * functional(aug.restricted(frozenset(sub)))
            out.append(total)
        return out

    return ev


def _inner_pool(window, system, beta, xs_locs, xs_marks, rng, inner, evaluator) -> np.ndarray:
    L = np.empty((inner, 5))
    retained = range(len(xs_locs))
    for t in range(inner):
        pts = sample_poisson(window, beta, rng)
        added = attach_points(window, xs_locs, rng, marks=xs_marks)
        key = int(rng.integers(0, 1 << 63))
        aug = build_augmented(pts, added, retained, system, key)
        L[t] = evaluator(aug)
    return L


def _outer_integrands(L: np.ndarray) -> np.ndarray:
    """The seven per-tuple integrand values from one inner pool."""
    h = len(L) // 2
    first, second = L[:h], L[h:]
    a_mean = float(np.mean(first[:, 0] ** 2 * first[:, 1] ** 2))
    b_mean = float(np.mean(second[:, 2] ** 2 * second[:, 3] ** 2))
    b_full = float(np.mean(L[:, 2] ** 2 * L[:, 3] ** 2))
    c_mean = float(np.mean(first[:, 0] ** 4))
    d_mean = float(np.mean(second[:, 4] ** 4))
    d_full = float(np.mean(L[:, 4] ** 4))
    p3 = float(np.mean(np.abs(L[:, 0]) ** 3))
    p4 = float(np.mean(L[:, 0] ** 4))
    return np.array([
        math.sqrt(a_mean * b_mean),       # gamma_1 integrand
        b_full,                           # gamma_2
        p3,                               # gamma_3
        p4**0.75,                         # gamma_4
        p4,                               # gamma_5
        6.0 * math.sqrt(c_mean * d_mean) + 3.0 * d_full,  # gamma_6
        math.sqrt(p4),                    # fourth-moment bound, first term
    ])


def _sqrt_delta(c: float, mean: float, se: float) -> MonteCarloEstimate:
    """c * sqrt(mean) with a symmetric finite-difference standard error."""
    value = c * math.sqrt(max(mean, 0.0))
    lo = c * math.sqrt(max(mean - se, 0.0))
    hi = c * math.sqrt(max(mean + se, 0.0))
    return MonteCarloEstimate(value, 0.5 * (hi - lo), 0)


def gamma_quantities(
    beta: float,
    window: Window,
    system: ConnectionSystem,
    a=None,
    outer_samples: int = 1000,
    inner_replicates: int = 200,
    seed=0,
    threads: int = 1,
    moment_report: MomentReport | None = None,
    zeta_samples: int = 20000,
    zeta_estimator: str = "plain",
    fourth_replicates: int = 2000,
    functional=None,
) -> GammaReport:
    """Estimate gamma_1..gamma_6 for the standardized Euler characteristic.

    With the default functional chi_a, the standardization uses the
    zeta-formula mean and variance; passing ``functional`` evaluates an
    arbitrary (already standardized) functional through the literal
    alternating-sum operators instead.
    """
    if inner_replicates < 100:
        raise ValueError("at least 100 inner replicates are required")
    if functional is None:
        a = np.asarray(a, dtype=float)
        if moment_report is None:
            cache = ZetaCache(window, system, samples=zeta_samples, seed=seed, estimator=zeta_estimator)
            moment_report = euler_moments(a, beta, window, system, cache=cache)
        variance = moment_report.variance.value
        if variance <= 0:
            raise ValueError("zero variance; the standardized functional is undefined")
        mean, sd = moment_report.mean.value, math.sqrt(variance)
        evaluator = _euler_evaluator(a)

        def plain_value(counts_row):
            return float(np.asarray(a) @ counts_row)

    else:
        mean, sd = 0.0, 1.0
        evaluator = _generic_evaluator(functional)
        plain_value = None

    mass = window.measure

    # fourth moment of the standardized functional over fresh realizations
    rng4 = _stream(seed, (4,))
    f_vals = np.empty(fourth_replicates)
    for i in range(fourth_replicates):
        pts = sample_poisson(window, beta, rng4)
        key = int(rng4.integers(0, 1 << 63))
        sample = build_complex(pts, system, key)
        if functional is None:
            f_vals[i] = (plain_value(sample.f_counts()) - mean) / sd
        else:
            f_vals[i] = functional(sample)
    q4 = f_vals**4
    m4 = MonteCarloEstimate(float(q4.mean()), float(q4.std(ddof=1) / math.sqrt(len(q4))), len(q4))

    # outer tuples drawn upfront so results do not depend on the thread count
    rng_outer = _stream(seed, (1,))
    xs_locs = window.sample_locations(rng_outer, outer_samples * 3).reshape(outer_samples, 3, -1)
    xs_marks = window.sample_marks(rng_outer, outer_samples * 3)
    if xs_marks is not None:
        xs_marks = xs_marks.reshape(outer_samples, 3)

    def one(s):
        rng = _stream(seed, (2, s))
        marks_s = None if xs_marks is None else xs_marks[s]
        L = _inner_pool(window, system, beta, xs_locs[s], marks_s, rng, inner_replicates, evaluator)
        return _outer_integrands(L)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(outer_samples)))
    else:
        rows = [one(s) for s in range(outer_samples)]
    G = np.array(rows)
    means = G.mean(axis=0)
    ses = G.std(axis=0, ddof=1) / math.sqrt(outer_samples)

    g1 = _sqrt_delta(2.0 * math.sqrt(beta**3 * mass**3) / sd**2, means[0], ses[0])
    g2 = _sqrt_delta(math.sqrt(beta**3 * mass**3) / sd**2, means[1], ses[1])
    g3 = MonteCarloEstimate(beta * mass * means[2] / sd**3, beta * mass * ses[2] / sd**3, outer_samples)
    c4 = 0.5 * beta * mass / sd**3
    g4_value = c4 * m4.value**0.25 * means[3]
    if m4.value > 0 and means[3] > 0:
        rel = math.hypot(ses[3] / means[3], m4.standard_error / (4.0 * m4.value))
        g4 = MonteCarloEstimate(g4_value, g4_value * rel, outer_samples)
    else:
        g4 = MonteCarloEstimate(g4_value, 0.0, outer_samples)
    g5 = _sqrt_delta(math.sqrt(beta * mass) / sd**2, means[4], ses[4])
    g6 = _sqrt_delta(beta * mass / sd**2, means[5], ses[5])
    gammas = (g1, g2, g3, g4, g5, g6)

    ward = MonteCarloEstimate(
        sum(g.value for g in gammas[:3]),
        math.sqrt(sum(g.standard_error**2 for g in gammas[:3])),
        outer_samples,
    )
    kolm = MonteCarloEstimate(
        sum(g.value for g in gammas),
        math.sqrt(sum(g.standard_error**2 for g in gammas)),
        outer_samples,
    )

    t1 = beta * mass * means[6] / sd**2
    t2 = 4.0 * beta * mass * means[4] / sd**4 + 2.0
    bound = max(256.0 * t1**2, t2)

    return GammaReport(
        beta=beta,
        alpha=system.alpha,
        gammas=gammas,
        wasserstein_bound=ward,
        kolmogorov_bound=kolm,
        fourth_moment=m4,
        fourth_moment_bound=bound,
        mean=mean,
        sd=sd,
        outer_samples=outer_samples,
        inner_replicates=inner_replicates,
    )


# ---------------------------------------------------------------------------
# empirical distances and experiment ladders


def empirical_kolmogorov(samples) -> float:
    """One-sample Kolmogorov statistic against the standard normal."""
    z = np.sort(np.asarray(samples, dtype=float))
    n = len(z)
    if n < 1000:
        raise ValueError("at least 1000 replicates are required")
    cdf = norm.cdf(z)
    grid = np.arange(n, dtype=float)
    return float(max(np.max((grid + 1.0) / n - cdf), np.max(cdf - grid / n)))


def standardized_euler_pool(
    beta: float,
    window: Window,
    system: ConnectionSystem,
    a,
    replicates: int,
    mean: float,
    sd: float,
    seed=0,
    threads: int = 1,
    counts: np.ndarray | None = None,
) -> np.ndarray:
    """Standardized chi_a values over independent realizations."""
    if counts is None:
        counts = replicate_counts(beta, window, system, replicates, seed, threads)
    chi = counts @ np.asarray(a, dtype=float)
    return (chi - mean) / sd


def fit_loglog_slope(xs, ys) -> float | None:
    """Least-squares slope of log(y) against log(x); None when undefined."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2 or np.any(xs <= 0) or np.any(ys <= 0):
        return None
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


@dataclass
class CltExperiment:
    """Configuration of one CLT validation ladder.

    ``regime`` selects the asymptotic scenario; the matching ladder field
    (betas for increasing intensity, windows otherwise) must be strictly
    increasing, and replicates per rung must be at least 1000.
    """

    regime: str
    a: tuple
    system: ConnectionSystem
    replicates: int = 1000
    betas: tuple = ()
    window: Window | None = None
    windows: tuple = ()
    beta: float | None = None
    marks: MarkSpace | None = None
    dim: int | None = None
    zeta_samples: int = 20000
    include_gammas: bool = False
    gamma_outer: int = 400
    gamma_inner: int = 120
    fourth_replicates: int = 1500
    threads: int = 1

    def __post_init__(self):
        if self.regime not in ("increasing_intensity", "increasing_window", "multivariate_stationary"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.replicates < 1000:
            raise ValueError("at least 1000 replicates per rung are required")
        if self.regime == "increasing_intensity":
            if not self.betas or self.window is None:
                raise ValueError("intensity regime needs betas and a fixed window")
            ladder = list(self.betas)
        else:
            if not self.windows or self.beta is None:
                raise ValueError("window regimes need a window ladder and a fixed beta")
            ladder = [w.measure for w in self.windows]
        if any(b >= c for b, c in zip(ladder, ladder[1:])):
            raise ValueError("ladder must be strictly increasing")


@dataclass
class RungResult:
    parameter: float
    ks: float | None
    replicates: int
    mean: float
    sd: float
    gammas: GammaReport | None = None
    extras: dict = field(default_factory=dict)


@dataclass
class LadderReport:
    regime: str
    rungs: list[RungResult]
    ks_slope: float | None
    gamma_slopes: dict[str, float] | None
    hypothesis: dict
    stationary: StationaryLimits | None = None


def _gamma_slopes(rungs: list[RungResult]) -> dict[str, float] | None:
    if any(r.gammas is None for r in rungs) or len(rungs) < 2:
        return None
    xs = [r.parameter for r in rungs]
    out = {}
    for i in range(6):
        ys = [r.gammas.gammas[i].value for r in rungs]
        out[f"gamma{i + 1}"] = fit_loglog_slope(xs, ys)
    return out


def run_clt_experiment(exp: CltExperiment, seed=0) -> LadderReport:
    """Run one ladder, checking the regime hypotheses before simulating."""
    a = np.asarray(exp.a, dtype=float)
    alpha = exp.system.alpha
    hypothesis: dict = {}
    rungs: list[RungResult] = []
    stationary = None

    if exp.regime == "increasing_intensity":
        cache = ZetaCache(exp.window, exp.system, samples=exp.zeta_samples, seed=seed)
        top = cache.get(alpha + 1, alpha + 1, alpha + 1)
        hypothesis["zeta_top"] = top
        if top.value - 3.0 * top.standard_error <= 0:
            raise HypothesisError("zeta^{a+1}_{a+1,a+1}(W) is not positive; the variance does not grow")
        for i, beta in enumerate(exp.betas):
            report = euler_moments(a, beta, exp.window, exp.system, cache=cache)
            sd = math.sqrt(report.variance.value)
            counts = replicate_counts(beta, exp.window, exp.system, exp.replicates, _subseed(seed, (10, i)), exp.threads)
            pool = standardized_euler_pool(beta, exp.window, exp.system, a, exp.replicates, report.mean.value, sd, counts=counts)
            ks = empirical_kolmogorov(pool)
            gam = None
            if exp.include_gammas:
                gam = gamma_quantities(
                    beta, exp.window, exp.system, a,
                    outer_samples=exp.gamma_outer, inner_replicates=exp.gamma_inner,
                    seed=_subseed(seed, (11, i)),
                    threads=exp.threads, moment_report=report,
                    fourth_replicates=exp.fourth_replicates,
                )
            rungs.append(RungResult(beta, ks, exp.replicates, report.mean.value, sd, gam))

    elif exp.regime == "increasing_window":
        dim = exp.dim or exp.windows[0].dim
        try:
            nu = integrability_nu(exp.system, dim, exp.marks, samples=exp.zeta_samples, seed=seed)
        except IntegrabilityError as exc:
            raise HypothesisError(f"integrability check failed: {exc}") from exc
        hypothesis["nu"] = nu
        ratios = []
        for i, window in enumerate(exp.windows):
            cache = ZetaCache(window, exp.system, samples=exp.zeta_samples, seed=seed,
                              estimator="pinned", rel_target=1e-3, max_factor=64)
            report = euler_moments(a, exp.beta, window, exp.system, cache=cache)
            ef_alpha = report.count_means[alpha]
            ratio = ef_alpha.scaled(1.0 / window.measure)
            ratios.append(ratio)
            if ratio.value - 3.0 * ratio.standard_error <= 0:
                raise HypothesisError(
                    f"E f_alpha / |W| is not bounded below at |W|={window.measure:g}"
                )
            sd = math.sqrt(report.variance.value)
            counts = replicate_counts(exp.beta, window, exp.system, exp.replicates, _subseed(seed, (10, i)), exp.threads)
            pool = standardized_euler_pool(exp.beta, window, exp.system, a, exp.replicates, report.mean.value, sd, counts=counts)
            ks = empirical_kolmogorov(pool)
            gam = None
            if exp.include_gammas:
                gam = gamma_quantities(
                    exp.beta, window, exp.system, a,
                    outer_samples=exp.gamma_outer, inner_replicates=exp.gamma_inner,
                    seed=_subseed(seed, (11, i)),
                    threads=exp.threads, moment_report=report,
                    fourth_replicates=exp.fourth_replicates,
                )
            rungs.append(RungResult(window.measure, ks, exp.replicates, report.mean.value, sd, gam,
                                    extras={"ef_alpha_ratio": ratio}))
        hypothesis["min_ef_alpha_ratio"] = min(r.value for r in ratios)

    else:  # multivariate_stationary
        dim = exp.dim or exp.windows[0].dim
        stationary = stationary_limits(
            exp.system, dim, exp.beta, exp.marks, samples=exp.zeta_samples, seed=seed,
            rel_target=2e-3, max_factor=64,
        )
        top = stationary.zeta0[(alpha + 1, alpha + 1, alpha + 1)]
        hypothesis["zeta0_top"] = top
        if top.value - 3.0 * top.standard_error <= 0:
            raise HypothesisError("zeta^{a+1}_{a+1,a+1}(0) is not positive")
        for i, window in enumerate(exp.windows):
            cache = ZetaCache(window, exp.system, samples=exp.zeta_samples, seed=seed,
                              estimator="pinned", rel_target=1e-3, max_factor=64)
            counts = replicate_counts(exp.beta, window, exp.system, exp.replicates, _subseed(seed, (10, i)), exp.threads)
            emp = empirical_moments(exp.beta, window, exp.system, exp.replicates, a=a, counts=counts)
            mass = window.measure
            cov_scaled = emp.counts_cov / mass
            cov_scaled_se = emp.counts_cov_se / mass
            dev = np.abs(cov_scaled - stationary.sigma) / np.sqrt(cov_scaled_se**2 + stationary.sigma_se**2)
            per_ks = []
            for m in range(1, alpha + 2):
                # per-coordinate standardization by the formula moments
                mu = cache.get(m, m, m).value * exp.beta**m / math.factorial(m)
                var = covariance_counts(m, m, exp.beta, window, exp.system, cache).value
                pool = (counts[:, m - 1] - mu) / math.sqrt(var)
                per_ks.append(empirical_kolmogorov(pool))
            rungs.append(
                RungResult(
                    mass,
                    float(np.max(per_ks)),
                    exp.replicates,
                    0.0,
                    1.0,
                    extras={
                        "cov_scaled": cov_scaled,
                        "cov_scaled_se": cov_scaled_se,
                        "sigma_dev_in_se": dev,
                        "per_coordinate_ks": per_ks,
                    },
                )
            )

    params = [r.parameter for r in rungs]
    ks_vals = [r.ks for r in rungs]
    ks_slope = fit_loglog_slope(params, ks_vals) if len(rungs) > 1 else None
    return LadderReport(
        regime=exp.regime,
        rungs=rungs,
        ks_slope=ks_slope,
        gamma_slopes=_gamma_slopes(rungs),
        hypothesis=hypothesis,
        stationary=stationary,
    )
