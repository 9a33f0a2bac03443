"""
GD and SGD drivers with step-size validation and per-step Lyapunov monitoring.

Row n of a trajectory describes Θₙ before step n: its risk, V(Θₙ), the norm of the
gradient used in step n, and the residual of the exact descent identity for that step.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from relu_sgd_lab.network.net_core import NetworkShape, ParamVector, StructuralError, random_params
from relu_sgd_lab.risk.lyapunov import (
    descent_rhs,
    energy_ceiling,
    lyapunov_value,
    norm_cap,
    step_bound_A,
    step_bound_intro,
    step_bound_V,
)
from relu_sgd_lab.risk.risk_engine import (
    ConstantTarget,
    GradientVector,
    NonFiniteGradientError,
    empirical_risk_and_gradient,
    evaluate_true,
    grid_resolution,
)
from relu_sgd_lab.sampling.input_model import (
    INIT_CHANNEL,
    InputDistribution,
    UniformBox,
    sample_batch,
    substream,
)
from relu_sgd_lab.training.schedules import Schedule, ScheduleVerdict

logger = logging.getLogger(__name__)

MODES = ("gd", "sgd")
BOUND_FORMS = ("V", "A", "intro")

# V 單調性與範數上限的容許誤差 (相對於 max{1, V})
MONOTONE_TOLERANCE = 1e-9

# running-mean 視窗大小 (SGD 經驗風險)
RUNNING_MEAN_WINDOW = 1000


class TrajectoryError(RuntimeError):
    """A validated trajectory broke V-monotonicity, the norm cap, or the energy budget."""

    def __init__(self, message: str, step: int, values: Optional[dict] = None):
        super().__init__(message)
        self.step = step
        self.values = values or {}


class ScheduleRejectedError(ValueError):
    """run() was called with a schedule that validate_schedule rejected and no override."""

    def __init__(self, verdict: ScheduleVerdict):
        super().__init__(verdict.reason)
        self.verdict = verdict


@dataclass(frozen=True)
class ExplicitInit:
    values: Tuple[float, ...]


@dataclass(frozen=True)
class UniformBoxInit:
    """Θ₀ uniform in [low, high]^dd, drawn on its own substream channel."""

    low: float = -1.0
    high: float = 1.0
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.high > self.low:
            raise ValueError(f"init box needs low < high, got [{self.low}, {self.high}]")


InitSpec = Union[ExplicitInit, UniformBoxInit]


@dataclass(frozen=True)
class RunConfig:
    """Everything one trajectory depends on."""

    shape: NetworkShape
    init: InitSpec
    distribution: InputDistribution
    xi: float
    schedule: Schedule
    batch_size: Union[int, Tuple[int, ...]] = 1
    seed: int = 0
    mode: str = "sgd"
    true_risk_every: int = 0
    resolution: Optional[int] = None
    stop_threshold: Optional[float] = None
    bound_form: str = "V"
    delta: float = 0.9
    override: bool = False
    descent_residual: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.bound_form not in BOUND_FORMS:
            raise ValueError(f"bound_form must be one of {BOUND_FORMS}, got {self.bound_form!r}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.distribution.d != self.shape.d:
            raise StructuralError(f"distribution has d={self.distribution.d}, shape has d={self.shape.d}")
        if not math.isfinite(self.xi):
            raise ValueError(f"xi must be finite, got {self.xi}")
        sizes = (self.batch_size,) if isinstance(self.batch_size, int) else tuple(self.batch_size)
        if not sizes or any(int(m) != m or m < 1 for m in sizes):
            raise StructuralError(f"batch sizes must be positive integers, got {self.batch_size}")
        if self.true_risk_every < 0:
            raise ValueError(f"true_risk_every must be nonnegative, got {self.true_risk_every}")
        if isinstance(self.init, ExplicitInit) and len(self.init.values) != self.shape.dd:
            raise StructuralError(f"explicit init has {len(self.init.values)} values, shape needs {self.shape.dd}")

    @property
    def a_param(self) -> float:
        return self.distribution.a_param

    @property
    def target(self) -> ConstantTarget:
        return ConstantTarget(self.xi)

    def batch_size_at(self, n: int) -> int:
        """Mₙ; a list repeats its last entry past its end."""
        if isinstance(self.batch_size, int):
            return self.batch_size
        return int(self.batch_size[min(n, len(self.batch_size) - 1)])


@dataclass
class TrajectoryRow:
    step: int
    gamma: float
    emp_risk: Optional[float]
    true_risk: Optional[float]
    V: float
    grad_norm: float
    descent_residual: Optional[float]
    wall_clock: float = 0.0

    @property
    def monitored_risk(self) -> float:
        """True risk when it was evaluated on this step, otherwise the empirical risk."""
        return self.true_risk if self.true_risk is not None else self.emp_risk


@dataclass
class TrajectoryRecord:
    """Rows of one run plus what the run summary needs."""

    config: RunConfig
    verdict: ScheduleVerdict
    initial_params: ParamVector
    rows: List[TrajectoryRow] = field(default_factory=list)
    final_params: Optional[ParamVector] = None
    final_V: Optional[float] = None
    final_true_risk: Optional[float] = None
    integration: dict = field(default_factory=dict)
    max_norm: float = 0.0
    v_monotone: bool = True
    norm_cap_held: bool = True
    energy_sum: float = 0.0
    energy_limit: Optional[float] = None
    stopped_early: bool = False
    violations: List[dict] = field(default_factory=list)

    @property
    def V0(self) -> float:
        return lyapunov_value(self.initial_params, self.config.xi)

    @property
    def steps_executed(self) -> int:
        return len(self.rows)

    @property
    def running_mean_emp_risk(self) -> Optional[float]:
        recent = [row.emp_risk for row in self.rows[-RUNNING_MEAN_WINDOW:] if row.emp_risk is not None]
        return float(np.mean(recent)) if recent else None

    def column(self, name: str) -> List[Optional[float]]:
        return [getattr(row, name) for row in self.rows]


def resolve_initial_params(cfg: RunConfig) -> ParamVector:
    """Θ₀ from an explicit list or a seeded uniform box independent of the data stream."""
    if isinstance(cfg.init, ExplicitInit):
        return ParamVector(cfg.shape, np.asarray(cfg.init.values, dtype=np.float64))
    seed = cfg.seed if cfg.init.seed is None else cfg.init.seed
    rng = substream(seed, INIT_CHANNEL, 0)
    return random_params(cfg.shape, rng, cfg.init.low, cfg.init.high)


def step_bound(cfg: RunConfig, phi0: ParamVector) -> float:
    """The step-size bound of cfg.bound_form evaluated at the realized Θ₀."""
    dist = cfg.distribution
    if cfg.bound_form == "V":
        return step_bound_V(phi0, cfg.a_param, cfg.shape.d, cfg.xi)
    if cfg.bound_form == "A":
        return step_bound_A(phi0, cfg.a_param, cfg.xi, cfg.shape.d)
    return step_bound_intro(phi0, dist.a, dist.b, cfg.xi, cfg.shape.d)


def validate_schedule(cfg: RunConfig, phi0: Optional[ParamVector] = None) -> ScheduleVerdict:
    """
    檢查學習率是否滿足收斂定理的假設。

    Accepted iff Σγₙ = ∞ (constant, or polynomial with p ≤ 1) and sup γₙ is at most the
    threshold: δ·[𝐚²(d+1)V(Θ₀)+1]⁻¹ for the V-form, the bound itself for the A-form and
    the intro form. A bound_fraction schedule is resolved against the same bound first.

    Examples:
        >>> phi0 = (-1.0, 1.0, 2.0, 2.0, -2.0, 0.0, 1.0, -1.0, 2.0, 3.0)
        >>> cfg = RunConfig(NetworkShape(1, 3), ExplicitInit(phi0), UniformBox(0.0, 1.0, 1), 3.0,
        ...                 Schedule.constant(0.01, 10))
        >>> validate_schedule(cfg).accepted
        True
    """
    phi0 = resolve_initial_params(cfg) if phi0 is None else phi0
    bound = step_bound(cfg, phi0)
    schedule = cfg.schedule.resolved(bound)
    threshold = cfg.delta * bound if cfg.bound_form == "V" else bound
    if not schedule.diverges:
        logger.info(f"schedule rejected: power {schedule.power} makes Σγₙ finite")
        return ScheduleVerdict.reject(cfg.bound_form, "divergence hypothesis violated", bound, threshold, schedule)
    if schedule.sup_gamma > threshold:
        reason = f"sup gamma {schedule.sup_gamma!r} exceeds the {cfg.bound_form}-form threshold {threshold!r}"
        logger.info(f"schedule rejected: {reason}")
        return ScheduleVerdict.reject(cfg.bound_form, reason, bound, threshold, schedule)
    logger.debug(f"schedule accepted: gamma0={schedule.gamma0!r} <= {threshold!r} ({cfg.bound_form}-form)")
    return ScheduleVerdict.accept(cfg.bound_form, bound, threshold, schedule)


def _gamma_for(cfg: RunConfig, n: int, gamma: Optional[float]) -> float:
    if gamma is not None:
        if gamma < 0.0:
            raise ValueError(f"step size must be nonnegative, got {gamma}")
        return gamma
    return cfg.schedule.gamma(n)


def _advance(theta: ParamVector, grad: GradientVector, gamma: float, n: int) -> ParamVector:
    try:
        return theta.moved(grad.values, gamma)
    except StructuralError as exc:
        raise NonFiniteGradientError(f"step {n}: update left the finite range (‖θ‖={theta.norm()!r})") from exc


def _finish_row(
    cfg: RunConfig,
    theta: ParamVector,
    theta_next: ParamVector,
    n: int,
    gamma: float,
    grad: GradientVector,
    risk: float,
    emp_risk: Optional[float],
    true_risk: Optional[float],
    started: float,
) -> TrajectoryRow:
    v_now = lyapunov_value(theta, cfg.xi)
    residual = None
    if cfg.descent_residual:
        residual = (lyapunov_value(theta_next, cfg.xi) - v_now) - descent_rhs(gamma, grad, risk)
    return TrajectoryRow(
        step=n,
        gamma=gamma,
        emp_risk=emp_risk,
        true_risk=true_risk,
        V=v_now,
        grad_norm=grad.norm(),
        descent_residual=residual,
        wall_clock=time.perf_counter() - started,
    )


def sgd_step(
    theta: ParamVector, n: int, cfg: RunConfig, gamma: Optional[float] = None
) -> Tuple[ParamVector, TrajectoryRow]:
    """
    Θₙ₊₁ = Θₙ - γₙ𝔊ⁿ(Θₙ) on batch n drawn from (cfg.seed, n).

    Args:
        theta: Θₙ
        n: step index
        cfg: run configuration (schedule must be resolved unless gamma is given)
        gamma: explicit step size overriding the schedule

    Returns:
        (Θₙ₊₁, row describing Θₙ)
    """
    started = time.perf_counter()
    gamma = _gamma_for(cfg, n, gamma)
    batch = sample_batch(cfg.distribution, n, cfg.batch_size_at(n), cfg.seed)
    try:
        risk, grad = empirical_risk_and_gradient(theta, batch, cfg.xi)
    except NonFiniteGradientError as exc:
        logger.error(f"non-finite gradient at step {n}")
        raise NonFiniteGradientError(f"step {n}: {exc} (‖θ‖={theta.norm()!r})") from exc
    true_risk = None
    if cfg.true_risk_every and n % cfg.true_risk_every == 0:
        true_risk = evaluate_true(theta, cfg.distribution, cfg.target, cfg.resolution).risk
    theta_next = _advance(theta, grad, gamma, n)
    row = _finish_row(cfg, theta, theta_next, n, gamma, grad, risk, risk, true_risk, started)
    return theta_next, row


def gd_step(
    theta: ParamVector, n: int, cfg: RunConfig, gamma: Optional[float] = None
) -> Tuple[ParamVector, TrajectoryRow]:
    """Θₙ₊₁ = Θₙ - γₙ𝒢(Θₙ) with the true generalized gradient."""
    started = time.perf_counter()
    gamma = _gamma_for(cfg, n, gamma)
    try:
        evaluation = evaluate_true(theta, cfg.distribution, cfg.target, cfg.resolution)
    except NonFiniteGradientError as exc:
        logger.error(f"non-finite gradient at step {n}")
        raise NonFiniteGradientError(f"step {n}: {exc} (‖θ‖={theta.norm()!r})") from exc
    theta_next = _advance(theta, evaluation.gradient, gamma, n)
    row = _finish_row(
        cfg, theta, theta_next, n, gamma, evaluation.gradient, evaluation.risk, None, evaluation.risk, started
    )
    return theta_next, row


def _violation(record: TrajectoryRecord, validated: bool, kind: str, step: int, values: dict) -> None:
    message = f"{kind} violated at step {step}: {values}"
    record.violations.append({"kind": kind, "step": step, **values})
    if validated:
        logger.error(message)
        raise TrajectoryError(message, step, values)
    logger.warning(f"{message} (override run, continuing)")


def run(cfg: RunConfig) -> TrajectoryRecord:
    """
    Execute one GD or SGD trajectory.

    Runs ``schedule.horizon`` steps, or stops after the first step whose monitored risk is
    below ``stop_threshold``. Under an accepted schedule V-monotonicity, the norm cap
    ‖Θₙ‖ ≤ V(Θ₀)^{1/2} and the energy budget are hard assertions (TrajectoryError); with
    ``override`` they are logged and collected in ``record.violations``.

    Raises:
        ScheduleRejectedError: the schedule was rejected and override is off
        TrajectoryError: a monitored property failed under a validated schedule
        NonFiniteGradientError: a gradient or update became non-finite
    """
    phi0 = resolve_initial_params(cfg)
    verdict = validate_schedule(cfg, phi0)
    if not verdict.accepted and not cfg.override:
        raise ScheduleRejectedError(verdict)
    validated = verdict.accepted
    if not validated:
        logger.warning(f"running with a rejected schedule ({verdict.reason}); monitors are advisory")
    schedule = verdict.schedule
    resolved_cfg = cfg if schedule is cfg.schedule else replace(cfg, schedule=schedule)

    if isinstance(cfg.distribution, UniformBox) and cfg.distribution.d > 1:
        logger.warning(
            f"d={cfg.distribution.d}: true risk uses a midpoint grid with "
            f"{grid_resolution(cfg.distribution.d, cfg.resolution)} points per axis"
        )

    record = TrajectoryRecord(config=resolved_cfg, verdict=verdict, initial_params=phi0)
    v0 = record.V0
    cap = norm_cap(v0)
    record.energy_limit = energy_ceiling(v0, schedule.sup_gamma, cfg.a_param, cfg.shape.d)
    record.max_norm = phi0.norm()
    step_fn = gd_step if cfg.mode == "gd" else sgd_step
    logger.info(
        f"{cfg.mode.upper()} run: seed={cfg.seed}, horizon={schedule.horizon}, "
        f"gamma0={schedule.gamma0!r}, V0={v0!r}, bound={verdict.bound!r}"
    )

    theta = phi0
    for n in range(schedule.horizon):
        theta_next, row = step_fn(theta, n, resolved_cfg)
        record.rows.append(row)
        record.energy_sum += row.gamma * (row.emp_risk if row.emp_risk is not None else row.true_risk)

        v_next = lyapunov_value(theta_next, cfg.xi)
        if v_next > row.V + MONOTONE_TOLERANCE * max(1.0, row.V):
            record.v_monotone = False
            _violation(record, validated, "V-monotonicity", n, {"V": row.V, "V_next": v_next})
        norm_next = theta_next.norm()
        record.max_norm = max(record.max_norm, norm_next)
        if norm_next > cap + MONOTONE_TOLERANCE * max(1.0, cap):
            record.norm_cap_held = False
            _violation(record, validated, "norm cap", n, {"norm": norm_next, "cap": cap})
        logger.debug(f"step {n}: gamma={row.gamma!r} risk={row.monitored_risk!r} V={row.V!r}")

        theta = theta_next
        if cfg.stop_threshold is not None and row.monitored_risk < cfg.stop_threshold:
            record.stopped_early = True
            logger.info(f"stopping after step {n}: risk {row.monitored_risk!r} < {cfg.stop_threshold!r}")
            break

    if record.energy_limit is not None and record.energy_sum > record.energy_limit * (1.0 + MONOTONE_TOLERANCE):
        _violation(
            record,
            validated,
            "energy budget",
            len(record.rows),
            {"energy": record.energy_sum, "ceiling": record.energy_limit},
        )

    final = evaluate_true(theta, cfg.distribution, cfg.target, cfg.resolution)
    record.final_params = theta
    record.final_V = lyapunov_value(theta, cfg.xi)
    record.final_true_risk = final.risk
    record.integration = final.metadata()
    logger.info(
        f"run finished after {record.steps_executed} steps: final true risk {final.risk!r}, "
        f"max ‖Θₙ‖ {record.max_norm!r} (cap {cap!r})"
    )
    return record


def run_many(cfg: RunConfig, seeds: Sequence[int]) -> List[TrajectoryRecord]:
    """Sequential seed sweep; the CLI fans seeds out over worker processes instead."""
    return [run(replace(cfg, seed=seed)) for seed in seeds]
