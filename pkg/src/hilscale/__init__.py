"""Spectral regularization in single and multiple Hilbert scales.

Diagonal test problems, filter families, a-priori parameter rules, weighted
multi-scale solutions, inequality certification, and convergence-order
sweeps.
"""

from .spectral_core import (
    CoeffVector,
    DimensionMismatchError,
    ScaleOperator,
    apply_power,
    scale_inner,
    scale_norm,
)
from .problems import (
    ExactSolution,
    ForwardOperator,
    Problem,
    SmoothingLink,
    TruncationError,
    integration_problem,
    moore_penrose,
    multi_scale_problem,
    problem_from_json,
    problem_to_json,
    synthetic_diagonal,
)
from .regularizers import (
    CertReport,
    DivergenceError,
    RegFamily,
    certify,
    landweber,
    residual,
    showalter,
    tikhonov,
    tsvd,
)
from .scales_single import (
    InvalidRuleError,
    ParamRule,
    ScaleConfig,
    alpha_from_rule,
    b_squared,
    error_r_norm,
    optimal_epsilon,
    regularize,
    theoretical_order,
)
from .scales_multi import (
    MultiConfig,
    MultiNoisePlan,
    ObservationSet,
    PlanUndefinedError,
    multi_noise_plan,
    optimal_eps_multi,
    regularize_multi,
    regularize_multi_vec,
    sigma_star,
)
from .verify import (
    IneqReport,
    heinz_check,
    interpolation_check,
    norm_equivalence,
    power_range_check,
    source_condition_check,
    standard_suite,
)
from .experiments import (
    FitError,
    MultiRule,
    NoiseSpec,
    RateRecord,
    RateReport,
    SaturationError,
    SweepConfig,
    emit_report,
    fit_order,
    load_report,
    make_noise,
    run_sweep,
    theoretical_order_multi,
)

__version__ = "0.1.0"
