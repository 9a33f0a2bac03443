"""GD / SGD drivers, schedules, and trajectory records."""

from relu_sgd_lab.risk.risk_engine import NonFiniteGradientError
from relu_sgd_lab.training.optimizer import (
    BOUND_FORMS,
    MODES,
    ExplicitInit,
    InitSpec,
    RunConfig,
    ScheduleRejectedError,
    TrajectoryError,
    TrajectoryRecord,
    TrajectoryRow,
    UniformBoxInit,
    gd_step,
    resolve_initial_params,
    run,
    run_many,
    sgd_step,
    step_bound,
    validate_schedule,
)
from relu_sgd_lab.training.schedules import Schedule, ScheduleVerdict

__all__ = [
    "BOUND_FORMS",
    "MODES",
    "ExplicitInit",
    "InitSpec",
    "NonFiniteGradientError",
    "RunConfig",
    "Schedule",
    "ScheduleRejectedError",
    "ScheduleVerdict",
    "TrajectoryError",
    "TrajectoryRecord",
    "TrajectoryRow",
    "UniformBoxInit",
    "gd_step",
    "resolve_initial_params",
    "run",
    "run_many",
    "sgd_step",
    "step_bound",
    "validate_schedule",
]
