"""
relu-sgd-lab

Shallow ReLU networks trained by GD / SGD on a constant target:
- closed-form generalized gradients of the empirical and true risk
- the Lyapunov function V and its exact descent identities
- step-size bounds, trajectory drivers, and randomized property suites
"""

__version__ = "0.1.0"

# Top-level imports for convenience
from relu_sgd_lab.network import NetworkShape, ParamVector, StructuralError, realize_exact, realize_smoothed
from relu_sgd_lab.risk import (
    empirical_gradient,
    empirical_risk,
    lyapunov_value,
    pairing_identity,
    step_bound_V,
    true_gradient,
    true_risk,
)
from relu_sgd_lab.sampling import DiscreteFinite, EmpiricalBatch, UniformBox, sample_batch
from relu_sgd_lab.training import RunConfig, Schedule, TrajectoryRecord, run, validate_schedule

__all__ = [
    # Version
    "__version__",
    # Network
    "NetworkShape",
    "ParamVector",
    "StructuralError",
    "realize_exact",
    "realize_smoothed",
    # Inputs
    "DiscreteFinite",
    "EmpiricalBatch",
    "UniformBox",
    "sample_batch",
    # Risk and Lyapunov
    "empirical_gradient",
    "empirical_risk",
    "lyapunov_value",
    "pairing_identity",
    "step_bound_V",
    "true_gradient",
    "true_risk",
    # Training
    "RunConfig",
    "Schedule",
    "TrajectoryRecord",
    "run",
    "validate_schedule",
]
