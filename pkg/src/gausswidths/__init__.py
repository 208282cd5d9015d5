"""Widths and hyperbolic-cross approximation for Gaussian-weighted Sobolev spaces."""

from .approx import (
    GridSpec,
    ProductCoeffRule,
    convergence_study,
    embedding_constant,
    l2_error,
    linf_sqrtg_error,
    tail_majorant,
    truncate,
)
from .assembler import (
    BudgetPlan,
    CubeWeights,
    assemble_envelope,
    build_budget,
    build_partition_of_unity,
    choose_delta,
    cube_weights,
    geometric_binomial_sum,
    xi_threshold,
)
from .bernstein import bernstein_lower_estimate, mrs_number, nikolskii_check, nikolskii_sweep
from .caps import DEFAULT_CAP, ResourceCapError
from .hermite import (
    HermiteSeries,
    QuadratureRule,
    gauss_hermite_rule,
    gaussian_density,
    hermite_eval,
    hermite_eval_weighted,
    hermite_transform,
    norm_l2_gamma,
    norm_sobolev,
    series_eval,
    tensor_eval,
)
from .indexsets import (
    IndexSet,
    chernov_dung_bounds,
    count_c,
    cross_cardinality_ratio,
    dyadic_block,
    hyperbolic_cross,
    level_set,
    rho,
)
from .widths import (
    RateExponent,
    RegimeNotCoveredError,
    WidthSequence,
    asymptotic_ratio,
    exact_widths,
    hilbert_coincidence_check,
    linf_exponent_bounds,
    rate_exponent,
    width_at_count,
)

__version__ = "0.1.0"
