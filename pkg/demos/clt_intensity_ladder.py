"""Normal approximation as the intensity grows.

Runs the increasing-intensity ladder for the generalized Euler
characteristic: per rung, the empirical Kolmogorov distance of the
standardized value against N(0, 1), and the six gamma quantities whose sum
bounds it.  The fitted log-log slope of the Kolmogorov distance should sit
near -1/2.

Budget note: a few minutes with the defaults below.
"""

from randcomplex import BoxWindow, CltExperiment, constant_system, run_clt_experiment

window = BoxWindow(((0.0, 1.0), (0.0, 1.0)))
system = constant_system(2, (0.6, 0.6))

experiment = CltExperiment(
    regime="increasing_intensity",
    a=(1.0, -1.0, 1.0),
    system=system,
    betas=(5.0, 20.0, 80.0),
    window=window,
    replicates=2000,
    include_gammas=True,
    gamma_outer=150,
    gamma_inner=100,
    fourth_replicates=800,
)

report = run_clt_experiment(experiment, seed=11)

print(f"{'beta':>6}{'KS':>10}{'sum gamma':>12}")
for rung in report.rungs:
    bound = rung.gammas.kolmogorov_bound.value
    print(f"{rung.parameter:>6.0f}{rung.ks:>10.4f}{bound:>12.3f}")
print(f"\nKS slope: {report.ks_slope:.3f} (theory: -1/2)")
for name, slope in report.gamma_slopes.items():
    print(f"{name} slope: {slope:.3f}")
