"""Lyapunov function V(φ) = ‖φ‖² + (c^φ - 2ξ)², its exact descent identities, and step-size bounds."""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from relu_sgd_lab.network.net_core import ParamVector, realize_exact
from relu_sgd_lab.risk.risk_engine import (
    ConstantTarget,
    GradientVector,
    TargetSpec,
    as_target,
    empirical_risk_and_gradient,
    evaluate_true,
    integration_rule,
)
from relu_sgd_lab.sampling.input_model import EmpiricalBatch, InputDistribution

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LyapunovReport:
    """
    One evaluation of the Lyapunov identities.

    ``pairing`` is ⟨∇V(φ), g⟩ and ``eight_risk`` is 8·risk for the same gradient g.
    ``descent_lhs`` / ``descent_rhs`` are filled by the descent identities and stay 0.0
    for a pure pairing check.
    """

    V_value: float
    pairing: float
    eight_risk: float
    descent_lhs: float = 0.0
    descent_rhs: float = 0.0
    exact: bool = True
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.V_value < 0.0:
            raise ValueError(f"V must be nonnegative, got {self.V_value}")

    @property
    def pairing_gap(self) -> float:
        return abs(self.pairing - self.eight_risk)

    @property
    def descent_residual(self) -> float:
        return self.descent_lhs - self.descent_rhs

    def pairing_holds(self, tol: float = IDENTITY_TOLERANCE) -> bool:
        return self.pairing_gap <= tol * (1.0 + abs(self.eight_risk))

    def descent_holds(self, tol: float = IDENTITY_TOLERANCE) -> bool:
        return abs(self.descent_residual) <= tol * (1.0 + abs(self.descent_rhs))


def lyapunov_value(phi: ParamVector, xi: float) -> float:
    """
    V(φ) = ‖φ‖² + (c - 2ξ)².

    Examples:
        >>> lyapunov_value(ParamVector.from_list(1, 3, [-1, 1, 2, 2, -2, 0, 1, -1, 2, 3]), 3.0)
        38.0
    """
    return float(phi.values @ phi.values + (phi.c - 2.0 * xi) ** 2)


def lyapunov_gradient(phi: ParamVector, xi: float) -> GradientVector:
    """∇V(φ) = 2φ + (0, ..., 0, 2(c - 2ξ))."""
    grad = 2.0 * phi.values
    grad[phi.shape.c_index] += 2.0 * (phi.c - 2.0 * xi)
    return GradientVector(phi.shape, grad)


def sandwich_bounds(phi: ParamVector, xi: float) -> Tuple[float, float, float]:
    """(‖φ‖², V(φ), 3‖φ‖² + 8ξ²); the middle value lies between the outer two."""
    norm_sq = float(phi.values @ phi.values)
    return norm_sq, lyapunov_value(phi, xi), 3.0 * norm_sq + 8.0 * xi * xi


def _pairing_report(phi: ParamVector, xi: float, grad: GradientVector, risk: float, exact: bool) -> LyapunovReport:
    pairing = float(lyapunov_gradient(phi, xi).values @ grad.values)
    return LyapunovReport(V_value=lyapunov_value(phi, xi), pairing=pairing, eight_risk=8.0 * risk, exact=exact)


def pairing_identity(phi: ParamVector, batch: EmpiricalBatch, xi: float) -> LyapunovReport:
    """
    ⟨∇V(φ), 𝔊ⁿ(φ)⟩ against 8·𝔏ⁿ_∞(φ).

    Examples:
        >>> phi = ParamVector.from_list(1, 3, [-1, 1, 2, 2, -2, 0, 1, -1, 2, 3])
        >>> report = pairing_identity(phi, EmpiricalBatch.of([[2.0]]), 3.0)
        >>> report.pairing, report.eight_risk
        (512.0, 512.0)
    """
    risk, grad = empirical_risk_and_gradient(phi, batch, xi)
    return _pairing_report(phi, xi, grad, risk, exact=True)


def pairing_identity_true(
    phi: ParamVector,
    dist: InputDistribution,
    target: Union[ConstantTarget, float],
    resolution: Optional[int] = None,
) -> LyapunovReport:
    """⟨∇V(φ), 𝒢(φ)⟩ against 8·𝓛_∞(φ) for a constant target."""
    target = as_target(target)
    if not isinstance(target, ConstantTarget):
        raise ValueError("pairing_identity_true needs a constant target; use pairing_identity_general")
    evaluation = evaluate_true(phi, dist, target, resolution)
    return _pairing_report(phi, target.xi, evaluation.gradient, evaluation.risk, evaluation.exact)


def pairing_identity_general(
    phi: ParamVector,
    dist: InputDistribution,
    target: TargetSpec,
    resolution: Optional[int] = None,
) -> LyapunovReport:
    """
    任意連續目標 f 的配對恆等式。

    V is anchored at ξ = f(0) and the pairing is compared with
    8·∫ (𝒩(x) - f(0))·(𝒩(x) - f(x)) μ(dx), evaluated on the same rule as 𝒢.
    """
    target = as_target(target)
    anchor = target.at_origin(phi.shape.d)
    rule = integration_rule(phi, dist, target, resolution)
    evaluation = evaluate_true(phi, dist, target, resolution)
    outputs = realize_exact(phi, rule.nodes)
    weighted = float(rule.weights @ ((outputs - anchor) * (outputs - target(rule.nodes))))
    pairing = float(lyapunov_gradient(phi, anchor).values @ evaluation.gradient.values)
    return LyapunovReport(
        V_value=lyapunov_value(phi, anchor),
        pairing=pairing,
        eight_risk=8.0 * weighted,
        exact=evaluation.exact,
        details={"anchor": anchor, "risk": evaluation.risk},
    )


def descent_rhs(gamma: float, grad: GradientVector, risk: float) -> float:
    """γ²‖g‖² + γ²g_dd² - 8γ·risk."""
    grad_sq = float(grad.values @ grad.values)
    return gamma * gamma * grad_sq + gamma * gamma * grad.last**2 - 8.0 * gamma * risk


def _descent_report(
    theta: ParamVector, gamma: float, xi: float, grad: GradientVector, risk: float, exact: bool
) -> LyapunovReport:
    if gamma < 0.0:
        raise ValueError(f"step size must be nonnegative, got {gamma}")
    v_before = lyapunov_value(theta, xi)
    v_after = lyapunov_value(theta.moved(grad.values, gamma), xi)
    grad_sq = float(grad.values @ grad.values)
    rhs = descent_rhs(gamma, grad, risk)
    pairing = float(lyapunov_gradient(theta, xi).values @ grad.values)
    return LyapunovReport(
        V_value=v_before,
        pairing=pairing,
        eight_risk=8.0 * risk,
        descent_lhs=v_after - v_before,
        descent_rhs=rhs,
        exact=exact,
        details={"V_next": v_after, "grad_norm": math.sqrt(grad_sq), "risk": risk},
    )


def descent_identity(theta: ParamVector, gamma: float, batch: EmpiricalBatch, xi: float) -> LyapunovReport:
    """
    V(θ - γ𝔊ⁿ(θ)) - V(θ) against γ²‖𝔊ⁿ‖² + γ²(𝔊ⁿ_dd)² - 8γ𝔏ⁿ_∞(θ).

    Examples:
        >>> phi = ParamVector.from_list(1, 3, [-1, 1, 2, 2, -2, 0, 1, -1, 2, 3])
        >>> report = descent_identity(phi, 0.001, EmpiricalBatch.of([[2.0]]), 3.0)
        >>> round(report.descent_rhs, 9), round(report.descent_lhs, 9)
        (-0.502272, -0.502272)
    """
    risk, grad = empirical_risk_and_gradient(theta, batch, xi)
    return _descent_report(theta, gamma, xi, grad, risk, exact=True)


def descent_identity_true(
    theta: ParamVector,
    gamma: float,
    dist: InputDistribution,
    xi: float,
    resolution: Optional[int] = None,
) -> LyapunovReport:
    """The same identity for a GD step with the true gradient 𝒢(θ)."""
    evaluation = evaluate_true(theta, dist, ConstantTarget(xi), resolution)
    return _descent_report(theta, gamma, xi, evaluation.gradient, evaluation.risk, evaluation.exact)


def one_step_bound(theta: ParamVector, gamma: float, risk: float, a_param: float, d: int, xi: float) -> float:
    """
    8·(γ²[𝐚²(d+1)V(θ) + 1] - γ)·risk.

    Upper bound for V(θ - γg) - V(θ); nonpositive as soon as γ ≤ step_bound_V(θ).
    """
    scale = a_param * a_param * (d + 1) * lyapunov_value(theta, xi) + 1.0
    return 8.0 * (gamma * gamma * scale - gamma) * risk


def step_bound_V(phi0: ParamVector, a_param: float, d: int, xi: float) -> float:
    """
    [𝐚²(d+1)V(φ₀) + 1]⁻¹.

    Examples:
        >>> phi = ParamVector.from_list(1, 3, [-1, 1, 2, 2, -2, 0, 1, -1, 2, 3])
        >>> step_bound_V(phi, 1.0, 1, 3.0) == 1 / 77
        True
    """
    return 1.0 / (a_param * a_param * (d + 1) * lyapunov_value(phi0, xi) + 1.0)


def step_bound_A(phi0: ParamVector, a_param: float, xi: float, d: int) -> float:
    """[18·𝐀⁵·(‖φ₀‖ + 1)²]⁻¹ with 𝐀 = max{𝐚, |ξ|, d}."""
    big_a = max(a_param, abs(xi), float(d))
    return 1.0 / (18.0 * big_a**5 * (phi0.norm() + 1.0) ** 2)


def step_bound_intro(phi0: ParamVector, a: float, b: float, xi: float, d: int) -> float:
    """(5 + 5‖φ₀‖)⁻² · max{|ξ|, |a|, |b|, d}⁻⁵."""
    scale = max(abs(xi), abs(a), abs(b), float(d))
    return 1.0 / ((5.0 + 5.0 * phi0.norm()) ** 2 * scale**5)


def energy_ceiling(v0: float, gamma_sup: float, a_param: float, d: int) -> Optional[float]:
    """
    V(Θ₀)/η with η = 8(1 - sup γ·[𝐚²(d+1)V(Θ₀) + 1]).

    Bounds Σ γₙ·riskₙ along a validated trajectory; None when η ≤ 0.
    """
    eta = 8.0 * (1.0 - gamma_sup * (a_param * a_param * (d + 1) * v0 + 1.0))
    if eta <= 0.0:
        return None
    return v0 / eta


def norm_cap(v0: float) -> float:
    """[V(Θ₀)]^{1/2}."""
    return float(np.sqrt(v0))
