"""Risks, generalized gradients, and the Lyapunov machinery."""

from relu_sgd_lab.risk.lyapunov import (
    IDENTITY_TOLERANCE,
    LyapunovReport,
    descent_identity,
    descent_identity_true,
    descent_rhs,
    energy_ceiling,
    lyapunov_gradient,
    lyapunov_value,
    norm_cap,
    one_step_bound,
    pairing_identity,
    pairing_identity_general,
    pairing_identity_true,
    sandwich_bounds,
    step_bound_A,
    step_bound_intro,
    step_bound_V,
)
from relu_sgd_lab.risk.risk_engine import (
    DEFAULT_RESOLUTION,
    EVAL_CHUNK,
    MAX_GRID_NODES,
    ConstantTarget,
    FunctionTarget,
    GradientVector,
    NonFiniteGradientError,
    TargetSpec,
    TrueEvaluation,
    as_target,
    empirical_gradient,
    empirical_risk,
    empirical_risk_and_gradient,
    empirical_risk_smoothed,
    evaluate_true,
    exact_fit,
    finite_difference_gradient,
    gradient_limit_gap,
    grid_resolution,
    integration_rule,
    kink_breakpoints,
    smoothed_empirical_gradient,
    true_gradient,
    true_gradient_smoothed,
    true_risk,
    true_risk_smoothed,
)

__all__ = [
    "DEFAULT_RESOLUTION",
    "EVAL_CHUNK",
    "MAX_GRID_NODES",
    "IDENTITY_TOLERANCE",
    "ConstantTarget",
    "FunctionTarget",
    "GradientVector",
    "LyapunovReport",
    "NonFiniteGradientError",
    "TargetSpec",
    "TrueEvaluation",
    "as_target",
    "descent_identity",
    "descent_identity_true",
    "descent_rhs",
    "empirical_gradient",
    "empirical_risk",
    "empirical_risk_and_gradient",
    "empirical_risk_smoothed",
    "energy_ceiling",
    "evaluate_true",
    "exact_fit",
    "finite_difference_gradient",
    "gradient_limit_gap",
    "grid_resolution",
    "integration_rule",
    "kink_breakpoints",
    "lyapunov_gradient",
    "lyapunov_value",
    "norm_cap",
    "one_step_bound",
    "pairing_identity",
    "pairing_identity_general",
    "pairing_identity_true",
    "sandwich_bounds",
    "smoothed_empirical_gradient",
    "step_bound_A",
    "step_bound_intro",
    "step_bound_V",
    "true_gradient",
    "true_gradient_smoothed",
    "true_risk",
    "true_risk_smoothed",
]
