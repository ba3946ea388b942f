"""Special functions, truncated-Poisson statistics and analytic constants."""
from .constants import (
    CriticalConstants,
    ExponentFunctions,
    critical_constants,
    d_coeff,
    d_series,
    d_taylor,
    exponent_functions,
    log_end_ratio,
    log_h1_peak,
    split_entropy,
)
from .poisson import (
    ModelParams,
    NoRootError,
    Thresholds,
    TruncPoissonStats,
    conditioned_mean,
    log_c_nm,
    log_double_factorial,
    model_params,
    solve_lambda,
    thresholds,
    trunc_poisson_stats,
)
from .roots import RootNotBracketed, bisect_newton, expand_bracket
from .special import AT_LEAST_3, DegreeSupport, as_support, log_tail_exp, tail_exp
