"""Acceptance criteria, one test per criterion.

Each test prints a `PASS criterion-N` line with the measured quantities so
a full run doubles as a verification report.  Expensive pools are shared
through module-scoped fixtures.  Budgets are sized for a small desktop
machine; the whole module runs in roughly half an hour.
"""

import math
from itertools import combinations

import numpy as np
import pytest
from scipy.stats import chi2

from randcomplex import (
    BoxWindow,
    CltExperiment,
    HyperbolicDiskWindow,
    ZetaCache,
    attach_points,
    build_augmented,
    build_complex,
    cech_system,
    constant_system,
    empirical_kolmogorov,
    empirical_moments,
    euler_characteristic,
    euler_lambda,
    euler_moments,
    gamma_quantities,
    hyperbolic_geometric_system,
    integrability_nu,
    lambda_operator,
    replicate_counts,
    restricted_counts,
    rips_system,
    run_clt_experiment,
    sample_poisson,
    standardized_euler_pool,
    stationary_indicator_system,
    zeta,
)
from randcomplex.space import PointSample

pytestmark = pytest.mark.acceptance

# configuration shared by the gamma-based criteria (6 and 7); the beta
# ladder and the slope bands are fixed, the system parameters are chosen so
# that the decay rates are visible at desk scale
GAMMA_BETAS = (5.0, 20.0, 80.0)
GAMMA_P = 0.3
GAMMA_Q = 0.4
GAMMA_SIDE = 2.0
GAMMA_A = (1.0, -1.0, 1.0)
# outer tuples / inner realizations per rung; the top rung carries most of
# the build cost, the cheap rungs take more outer samples instead
GAMMA_BUDGET = {5.0: (500, 120), 20.0: (400, 120), 80.0: (220, 110)}

STATIONARY_R0 = 0.1
STATIONARY_BETA = 50.0
STATIONARY_LENGTHS = (10.0, 40.0, 160.0)
# the strict KS decrease across rungs needs the one-sample noise floor
# (~0.87/sqrt(R)) well below the rung gaps
STATIONARY_REPLICATES = 12000


def combined(*ses):
    return math.sqrt(sum(s**2 for s in ses))


# ---------------------------------------------------------------------------
# shared fixtures


@pytest.fixture(scope="module")
def moment_pool():
    """Criterion 2 pool: 2e4 realizations of the pinned constant system."""
    window = BoxWindow(((0.0, 1.0), (0.0, 1.0)))
    system = constant_system(2, (0.3, 0.5))
    beta = 10.0
    counts = replicate_counts(beta, window, system, 20000, seed=202)
    return window, system, beta, counts


@pytest.fixture(scope="module")
def gamma_ladder():
    """Criteria 6-7: gamma reports over the beta ladder."""
    window = BoxWindow(((0.0, GAMMA_SIDE), (0.0, GAMMA_SIDE)))
    system = constant_system(2, (GAMMA_P, GAMMA_Q))
    reports = {}
    for i, beta in enumerate(GAMMA_BETAS):
        outer, inner = GAMMA_BUDGET[beta]
        reports[beta] = gamma_quantities(
            beta, window, system, a=GAMMA_A,
            outer_samples=outer, inner_replicates=inner,
            seed=600 + i, fourth_replicates=2000,
        )
    return window, system, reports


@pytest.fixture(scope="module")
def window_ladder():
    """Criterion 8: the increasing-window experiment on the 1-D indicator system."""
    system = stationary_indicator_system(2, STATIONARY_R0)
    windows = tuple(BoxWindow(((0.0, L),)) for L in STATIONARY_LENGTHS)
    exp = CltExperiment(
        regime="increasing_window", a=GAMMA_A, system=system,
        replicates=STATIONARY_REPLICATES, windows=windows, beta=STATIONARY_BETA,
        dim=1, zeta_samples=20000,
    )
    return run_clt_experiment(exp, seed=808)


@pytest.fixture(scope="module")
def multivariate_ladder():
    """Criterion 9: the multivariate experiment on the same stationary system."""
    system = stationary_indicator_system(2, STATIONARY_R0)
    windows = tuple(BoxWindow(((0.0, L),)) for L in STATIONARY_LENGTHS)
    exp = CltExperiment(
        regime="multivariate_stationary", a=GAMMA_A, system=system,
        replicates=1000, windows=windows, beta=STATIONARY_BETA,
        dim=1, zeta_samples=20000,
    )
    return run_clt_experiment(exp, seed=909)


# ---------------------------------------------------------------------------
# criterion 1: exact difference-operator identity


def test_criterion_1_lambda_identity_exact():
    rng = np.random.default_rng(101)
    window = BoxWindow(((0.0, 1.0), (0.0, 1.0)))

    def make_system(alpha, which):
        if which == 0:
            return constant_system(alpha, rng.uniform(0.2, 0.9, size=alpha))
        if which == 1:
            return rips_system(alpha, float(rng.uniform(0.25, 0.6)))
        return cech_system(alpha, float(rng.uniform(0.2, 0.4)))

    checked = 0
    for trial in range(200):
        alpha = int(rng.integers(1, 4))
        system = make_system(alpha, trial % 3)
        a = rng.integers(-3, 4, size=alpha + 1).astype(float)
        beta = float(rng.uniform(5.0, 50.0))
        pts = sample_poisson(window, beta, rng)
        if len(pts) > 50:
            keep = rng.choice(len(pts), size=50, replace=False)
            pts = PointSample(pts.locations[keep], pts.order_keys[keep],
                              pts.indices[keep], None, pts.chart)
        k = 1 + trial % 2
        l = k + int(rng.integers(0, 3))
        added = attach_points(window, rng.random((l, 2)), rng)
        aug = build_augmented(pts, added, range(k), system, int(rng.integers(1 << 62)))
        lhs = lambda_operator(aug, k, lambda c: euler_characteristic(c, a))
        rhs = euler_lambda(aug, range(k), a)
        # the same sum assembled from the restricted-count operation
        direct = sum(
            a[i] * restricted_counts(aug, range(k), i) for i in range(k - 1, alpha + 1)
        )
        assert lhs == rhs == direct
        checked += 1
    print(f"\nPASS criterion-1: {checked} configurations, exact integer-weighted equality")


# ---------------------------------------------------------------------------
# criterion 2: moment formulas


def test_criterion_2_moment_formulas(moment_pool):
    window, system, beta, counts = moment_pool
    a = np.array([1.0, -1.0, 1.0])
    emp = empirical_moments(beta, window, system, len(counts), a=a, counts=counts)
    cache = ZetaCache(window, system, samples=20000, seed=22)
    report = euler_moments(a, beta, window, system, cache=cache)

    targets = (10.0, 15.0, 2.25)
    for m, target in enumerate(targets):
        formula = report.count_means[m]
        tol = 4 * combined(formula.standard_error, emp.counts_mean_se[m])
        assert abs(formula.value - target) < 1e-9
        assert abs(emp.counts_mean[m] - target) < tol
    var_tol = 4 * combined(report.variance.standard_error, emp.chi_var_se)
    assert abs(report.variance.value - emp.chi_var) < var_tol
    print(
        f"\nPASS criterion-2: mean f = {np.round(emp.counts_mean, 3)} vs {targets}; "
        f"Var chi formula {report.variance.value:.3f} vs empirical {emp.chi_var:.3f} "
        f"(tol {var_tol:.3f})"
    )


# ---------------------------------------------------------------------------
# criterion 3: distributional oracle on six fixed points


def _exact_joint_law(p, q):
    """Joint pmf of (f1, f2) on 6 fixed vertices by exhaustive enumeration."""
    edges = list(combinations(range(6), 2))
    edge_index = {e: i for i, e in enumerate(edges)}
    triangles = list(combinations(range(6), 3))
    tri_masks = np.array(
        [sum(1 << edge_index[e] for e in combinations(t, 2)) for t in triangles],
        dtype=np.int64,
    )
    patterns = np.arange(1 << 15, dtype=np.int64)
    popcount = np.zeros(1 << 15, dtype=np.int64)
    for b in range(15):
        popcount += (patterns >> b) & 1
    tri_counts = np.zeros(1 << 15, dtype=np.int64)
    for mask in tri_masks:
        tri_counts += (patterns & mask) == mask
    pmf = np.zeros((16, 21))
    log_p, log_1p = math.log(p), math.log(1 - p)
    pattern_prob = np.exp(popcount * log_p + (15 - popcount) * log_1p)
    from scipy.stats import binom

    for t in range(int(tri_counts.max()) + 1):
        weight = pattern_prob[tri_counts == t]
        if len(weight) == 0:
            continue
        e_vals = popcount[tri_counts == t]
        for e in range(16):
            w = weight[e_vals == e].sum()
            if w > 0:
                pmf[e, : t + 1] += w * binom.pmf(np.arange(t + 1), t, q)
    return pmf


def test_criterion_3_distributional_oracle():
    p, q = 0.5, 0.25
    system = constant_system(2, (p, q))
    pts = PointSample(
        np.array([[0.1, 0.2], [0.8, 0.3], [0.4, 0.9], [0.2, 0.6], [0.7, 0.8], [0.5, 0.1]]),
        np.linspace(0.1, 0.9, 6),
        np.arange(6),
    )
    n_seeds = 100000
    observed = np.zeros((16, 21), dtype=np.int64)
    for key in range(n_seeds):
        f = build_complex(pts, system, key).f_counts()
        observed[f[1], f[2]] += 1

    pmf = _exact_joint_law(p, q)
    assert abs(pmf.sum() - 1.0) < 1e-9
    expected = pmf * n_seeds

    # pool cells with small expected counts to keep the chi^2 approximation valid
    flat_obs = observed.ravel()
    flat_exp = expected.ravel()
    order = np.argsort(flat_exp)[::-1]
    obs_cells, exp_cells = [], []
    tail_obs = tail_exp = 0.0
    for idx in order:
        if flat_exp[idx] >= 5.0:
            obs_cells.append(flat_obs[idx])
            exp_cells.append(flat_exp[idx])
        else:
            tail_obs += flat_obs[idx]
            tail_exp += flat_exp[idx]
    if tail_exp > 0:
        obs_cells.append(tail_obs)
        exp_cells.append(tail_exp)
    obs_cells = np.asarray(obs_cells, dtype=float)
    exp_cells = np.asarray(exp_cells, dtype=float)
    stat = float(((obs_cells - exp_cells) ** 2 / exp_cells).sum())
    dof = len(obs_cells) - 1
    threshold = chi2.ppf(0.99, dof)
    assert stat < threshold
    print(
        f"\nPASS criterion-3: chi2 = {stat:.1f} < {threshold:.1f} "
        f"({dof} dof, {n_seeds} mark seeds)"
    )


# ---------------------------------------------------------------------------
# criterion 4: zeta identities


def test_criterion_4_zeta_identities():
    cases = [
        ("rips-box", BoxWindow(((0.0, 1.0), (0.0, 1.0))), rips_system(2, 0.6)),
        (
            "hyperbolic",
            HyperbolicDiskWindow(1.0),
            hyperbolic_geometric_system(2, 1.0, (0.5,)),
        ),
    ]
    lines = []
    for name, window, system in cases:
        seeds = iter(range(400, 440))
        z = lambda m, l, r, n=60000: zeta(
            m, l, r, window, system, samples=n, rng=np.random.default_rng(next(seeds))
        )
        # (ii) exact base cases
        one = z(1, 1, 1)
        two = z(1, 1, 2)
        assert one.value == window.measure and one.standard_error == 0.0
        assert two.value == window.measure**2 and two.standard_error == 0.0
        # (i) symmetry in (m, l) with independent streams
        a1, a2 = z(2, 3, 4), z(3, 2, 4)
        assert abs(a1.value - a2.value) < 3 * combined(a1.standard_error, a2.standard_error)
        # (iii) nested simplices collapse
        b1, b2 = z(2, 3, 3), z(3, 3, 3)
        assert abs(b1.value - b2.value) < 3 * combined(b1.standard_error, b2.standard_error)
        # (iv) disjoint generators factorize
        c_joint, c_part = z(2, 2, 4), z(2, 2, 2)
        prod = c_part.value**2
        prod_se = 2 * abs(c_part.value) * c_part.standard_error
        assert abs(c_joint.value - prod) < 3 * combined(c_joint.standard_error, prod_se)
        lines.append(f"{name}: sym {a1.value:.4f}~{a2.value:.4f}, nest {b1.value:.4f}~{b2.value:.4f}, prod {c_joint.value:.4f}~{prod:.4f}")
    print("\nPASS criterion-4: " + "; ".join(lines))


# ---------------------------------------------------------------------------
# criterion 5: variance lower bound


def test_criterion_5_variance_lower_bound(moment_pool):
    window, system, beta, _ = moment_pool
    configs = [
        (np.array([1.0, -1.0, 1.0]), beta, window, system),
        (np.array([2.0, 0.5, -1.5]), 7.0, window, rips_system(2, 0.4)),
        (
            np.array([1.0, -1.0, 1.0]),
            20.0,
            HyperbolicDiskWindow(1.0),
            hyperbolic_geometric_system(2, 0.5, (0.6,)),
        ),
    ]
    lines = []
    for i, (a, b, w, s) in enumerate(configs):
        rep = euler_moments(a, b, w, s, samples=20000, seed=550 + i)
        lb = rep.variance_lower_bound
        slack = 3 * combined(rep.variance.standard_error, lb.standard_error)
        assert rep.variance.value >= lb.value - slack
        lines.append(f"Var {rep.variance.value:.2f} >= {lb.value:.2f}")
    print("\nPASS criterion-5: " + "; ".join(lines))


# ---------------------------------------------------------------------------
# criterion 6: the Kolmogorov bound holds empirically


def test_criterion_6_kolmogorov_inequality(gamma_ladder):
    window, system, reports = gamma_ladder
    lines = []
    for i, beta in enumerate((5.0, 20.0)):
        rep = reports[beta]
        pool = standardized_euler_pool(
            beta, window, system, GAMMA_A, 10000, rep.mean, rep.sd, seed=700 + i
        )
        ks = empirical_kolmogorov(pool)
        bound = rep.kolmogorov_bound
        assert ks <= bound.value + 3 * bound.standard_error
        lines.append(f"beta={beta:g}: KS {ks:.4f} <= bound {bound.value:.3f}")
    print("\nPASS criterion-6: " + "; ".join(lines))


# ---------------------------------------------------------------------------
# criterion 7: decay rates over the beta ladder


def test_criterion_7_gamma_rate_bands(gamma_ladder):
    from randcomplex import fit_loglog_slope

    _, _, reports = gamma_ladder
    bands = {
        1: (-0.8, -0.2),
        2: (-1.9, -1.1),
        3: (-0.8, -0.2),
        4: (-0.8, -0.2),
        5: (-0.8, -0.2),
        6: (-1.4, -0.6),
    }
    slopes = {}
    for i in range(6):
        ys = [reports[b].gammas[i].value for b in GAMMA_BETAS]
        slopes[i + 1] = fit_loglog_slope(GAMMA_BETAS, ys)
    for idx, (lo, hi) in bands.items():
        assert lo < slopes[idx] < hi, f"gamma{idx} slope {slopes[idx]:.3f} outside ({lo}, {hi})"
    print(
        "\nPASS criterion-7: slopes "
        + " ".join(f"g{i}={slopes[i]:.2f}" for i in range(1, 7))
    )


# ---------------------------------------------------------------------------
# criterion 8: increasing-window CLT


def test_criterion_8_increasing_window(window_ladder):
    report = window_ladder
    ks = [r.ks for r in report.rungs]
    assert all(x > y for x, y in zip(ks, ks[1:])), f"KS not strictly decreasing: {ks}"
    assert ks[-1] < 0.05
    nu = report.hypothesis["nu"]
    assert abs(nu.value - 2 * STATIONARY_R0) <= 2 * nu.standard_error + 1e-12
    print(
        f"\nPASS criterion-8: KS ladder {[round(k, 4) for k in ks]}, "
        f"nu = {nu.value:.4f} (target {2 * STATIONARY_R0})"
    )


# ---------------------------------------------------------------------------
# criterion 9: multivariate CLT


def test_criterion_9_multivariate(multivariate_ladder):
    report = multivariate_ladder
    stationary = report.stationary
    last = report.rungs[-1]
    dev = last.extras["sigma_dev_in_se"]
    assert float(dev.max()) < 4.0, f"covariance deviates by {dev.max():.2f} SE"
    sigma = stationary.sigma
    assert np.allclose(sigma, sigma.T)
    # positive definiteness: certified through the theorem's sufficient
    # condition zeta_top(0) > 0 (shrunk by 3 SE); at beta = 50 the counts
    # are nearly collinear, so the smallest eigenvalue itself can only be
    # asserted up to the Monte Carlo noise level of the Sigma entries
    alpha = len(sigma) - 1
    top = stationary.zeta0[(alpha + 1, alpha + 1, alpha + 1)]
    assert top.value - 3.0 * top.standard_error > 0
    noise = 3.0 * float(np.linalg.norm(stationary.sigma_se))
    min_eig = float(np.linalg.eigvalsh(sigma).min())
    assert min_eig > -noise
    print(
        f"\nPASS criterion-9: max |cov/|W| - sigma| = {dev.max():.2f} SE, "
        f"zeta_top - 3SE = {top.value - 3 * top.standard_error:.4f} > 0, "
        f"min eig {min_eig:.3f} (noise level {noise:.1f})"
    )


# ---------------------------------------------------------------------------
# criterion 10: byte-identical reproducibility


def test_criterion_10_reproducibility(tmp_path):
    from randcomplex.cli import main

    ini = """
[run]
task = moments
seed = 31
out = {out}

[space]
kind = box
bounds = 0,1 ; 0,1

[system]
kind = constant
alpha = 2
p = 0.3, 0.5

[euler]
a = 1, -1, 1

[mc]
beta = 10
zeta_samples = 2000
replicates = 2000
"""
    outs = []
    for run_id in ("a", "b"):
        out = tmp_path / run_id
        cfg = tmp_path / f"{run_id}.ini"
        cfg.write_text(ini.format(out=out))
        assert main(["--config", str(cfg)]) == 0
        outs.append((out / "moments.csv").read_bytes())
    assert outs[0] == outs[1]
    print(f"\nPASS criterion-10: {len(outs[0])} identical bytes across repeated runs")
