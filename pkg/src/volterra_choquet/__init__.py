"""Choquet integration with distorted Lebesgue measures and the nonlinear
Volterra operator built on it, plus property-verification suites."""

from .capacities import (
    Capacity,
    DistortedLebesgue,
    DistortionFunction,
    GeneralCapacity,
    capacity_from_spec,
    catalog,
    check_capacity_laws,
    custom_distortion,
    distortion,
    measure,
    total_mass,
)
from .choquet import (
    IntegralResult,
    QuadratureConfig,
    batch_prefix_integrals,
    choquet_integral,
    choquet_integral_eq3,
    choquet_monotone,
    discrete_choquet_sorted,
    oracle_beta_riemann,
)
from .functions import (
    Function,
    PiecewiseLinearFunction,
    StepFunction,
    abs_diff,
    absolute,
    add,
    comonotone_pair,
    evaluate,
    function_from_spec,
    lebesgue_integral,
    pointwise_map,
    power,
    preset,
    random_function,
    scale,
    shift,
    subtract,
    superlevel,
)
from .intervals import IntervalUnion, intersect, interval_union, length, union
from .spaces import (
    LpConfig,
    embedding_margin,
    holder_margin,
    lp_norm,
    minkowski_margin,
    uniform_norm,
)
from .verify import (
    SuiteReport,
    equicontinuity_failure_demo,
    run_suite,
    span_residual,
    suite_names,
)
from .volterra import (
    CLASSICAL_NORM_REFERENCE,
    OrbitRecord,
    apply_volterra,
    classical_opnorm,
    identity_plus_v,
    iterate_volterra,
    lipschitz_norm_estimate,
    orbit_closed_form,
)

__version__ = "0.1.0"
