"""Random connection simplicial complexes: simulation and verification.

The model places a Poisson process in an observation window and builds a
random simplicial complex by accepting each candidate simplex, all of whose
faces were accepted, independently with a dimension-indexed connection
probability.  The package samples the model, evaluates the closed-form
moment and variance formulas through Monte Carlo zeta integrals, estimates
the normal-approximation bounds gamma_1..gamma_6, and runs the central
limit theorem ladders at desk scale.
"""

from .complexes import (
    AugmentedSample,
    ComplexSample,
    build_augmented,
    build_complex,
    derive_mark,
)
from .connect import (
    ConnectionSystem,
    PairProfile,
    cech_system,
    constant_system,
    hyperbolic_geometric_system,
    hyperbolic_line_system,
    indicator_profile,
    mark_radius_profile,
    rips_system,
    smallest_enclosing_radius,
    stationary_indicator_system,
    stationary_marked_system,
)
from .functional import (
    euler_characteristic,
    euler_coefficients,
    euler_lambda,
    lambda_operator,
    restricted_counts,
    simplex_counts,
)
from .moments import (
    ComplexTemplate,
    EmpiricalMoments,
    IntegrabilityError,
    MomentReport,
    MonteCarloEstimate,
    StationaryLimits,
    ZetaCache,
    covariance_counts,
    empirical_moments,
    euler_moments,
    expected_count,
    integrability_nu,
    integral_representation,
    replicate_counts,
    stationary_limits,
    zeta,
    zeta_stationary_limit,
    zeta_template,
    zeta_window_pinned,
)
from .normapprox import (
    CltExperiment,
    GammaReport,
    HypothesisError,
    LadderReport,
    empirical_kolmogorov,
    fit_loglog_slope,
    gamma_quantities,
    run_clt_experiment,
    standardized_euler_pool,
)
from .render import disk_svg, geodesic_arc, line_process_svg
from .space import (
    BoxWindow,
    HyperbolicDiskWindow,
    MarkSpace,
    Point,
    PointSample,
    Window,
    attach_points,
    ball_from_chart,
    euclidean_distance,
    hyperbolic_chart_distance,
    hyperbolic_distance,
    inradius,
    measure,
    sample_poisson,
)

__version__ = "0.1.0"
