"""
Risk and gradient quantities of the shallow ReLU network.

All quantities share one weighted evaluation: a set of nodes x_k with weights w_k
(the 1/M weights of a mini-batch, the weights of a discrete μ, or an integration rule
for a uniform μ). For the exact ReLU the generalized gradient is evaluated from its
closed form with strict-positivity indicators; for R_r the analytic chain rule is used.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from relu_sgd_lab.network import smooth_relu
from relu_sgd_lab.network.net_core import (
    NetworkShape,
    ParamVector,
    StructuralError,
    pre_activations,
    relu,
)
from relu_sgd_lab.sampling.input_model import (
    DiscreteFinite,
    EmpiricalBatch,
    InputDistribution,
    IntegrationRule,
    UniformBox,
    discrete_rule,
    gauss_legendre_rule,
    quadrature_grid,
)

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

# |w_i| 小於此值視為沒有 kink (該神經元在盒子上是常數)
KINK_GUARD = 1e-300

DEFAULT_RESOLUTION = 256

# d ≥ 2 預設網格的節點總數上限
MAX_GRID_NODES = 2**20

# 每次加權求和處理的節點數 (限制 nodes × H 暫存陣列的大小)
EVAL_CHUNK = 2**16


class NonFiniteGradientError(ArithmeticError):
    """A gradient evaluation produced NaN or Inf."""


class GradientVector(ParamVector):
    """Gradient in R^dd with the same W/b/v/c views as the parameter vector."""

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if values.size != self.shape.dd:
            raise StructuralError(f"gradient has {values.size} entries, shape needs {self.shape.dd}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteGradientError(
                f"non-finite gradient entries at positions {np.flatnonzero(~np.isfinite(values)).tolist()}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def last(self) -> float:
        """The c-component G_dd."""
        return self.c


@dataclass(frozen=True)
class ConstantTarget:
    """f ≡ ξ."""

    xi: float

    def __call__(self, points: FloatArray) -> FloatArray:
        return np.full(points.shape[0], float(self.xi))

    def at_origin(self, d: int) -> float:
        return float(self.xi)


@dataclass(frozen=True)
class FunctionTarget:
    """A continuous target f evaluated row-wise on an (K, d) array."""

    func: Callable[[FloatArray], ArrayLike]
    name: str = "f"

    def __call__(self, points: FloatArray) -> FloatArray:
        values = np.asarray(self.func(points), dtype=np.float64).reshape(-1)
        if values.size != points.shape[0]:
            raise StructuralError(f"target {self.name} returned {values.size} values for {points.shape[0]} points")
        return values

    def at_origin(self, d: int) -> float:
        return float(self(np.zeros((1, d)))[0])


TargetSpec = Union[ConstantTarget, FunctionTarget]


def as_target(target: Union[TargetSpec, float]) -> TargetSpec:
    """Accept a bare real as a constant target."""
    if isinstance(target, (ConstantTarget, FunctionTarget)):
        return target
    return ConstantTarget(float(target))


@dataclass(frozen=True)
class TrueEvaluation:
    """True risk and gradient with the integration metadata they were computed with."""

    risk: float
    gradient: GradientVector
    exact: bool
    method: str
    resolution: Optional[int] = None

    def metadata(self) -> dict:
        return {"method": self.method, "exact": self.exact, "resolution": self.resolution}


def _weighted_risk_and_gradient(
    phi: ParamVector,
    points: FloatArray,
    weights: FloatArray,
    targets: FloatArray,
    r: Optional[int] = None,
) -> Tuple[float, FloatArray]:
    """
    Σ_k w_k (𝒩(x_k) - f_k)² and its gradient.

    r=None uses the exact ReLU with the closed-form generalized gradient
    (indicator 1_{pre > 0}); a finite r uses R_r and its derivative.
    """
    if points.shape[1] != phi.shape.d:
        raise StructuralError(f"inputs have d={points.shape[1]}, network expects d={phi.shape.d}")
    pre = pre_activations(phi, points)
    if r is None:
        act = relu(pre)
        slope = (pre > 0.0).astype(np.float64)
    else:
        act = smooth_relu.value(r, pre)
        slope = smooth_relu.derivative(r, pre)
    residual = phi.c + act @ phi.v - targets
    weighted = weights * residual
    risk = float(weighted @ residual)

    # 2 Σ_k w_k res_k · slope_ki，每個隱藏神經元一欄
    unit_weight = 2.0 * (weighted @ slope)
    grad_b = phi.v * unit_weight
    grad_W = 2.0 * phi.v[:, None] * ((weighted[:, None] * slope).T @ points)
    grad_v = 2.0 * (weighted @ act)
    grad_c = 2.0 * float(weighted.sum())
    # + 0.0 把 v_i < 0 乘上 0 產生的 -0.0 正規化
    grad = np.concatenate([grad_W.reshape(-1), grad_b, grad_v, [grad_c]]) + 0.0
    return risk, grad


def _chunked_risk_and_gradient(
    phi: ParamVector,
    points: FloatArray,
    weights: FloatArray,
    targets: FloatArray,
    r: Optional[int] = None,
) -> Tuple[float, FloatArray]:
    """The weighted pass over at most EVAL_CHUNK nodes at a time, summed."""
    if points.shape[0] <= EVAL_CHUNK:
        return _weighted_risk_and_gradient(phi, points, weights, targets, r)
    risk = 0.0
    grad = np.zeros(phi.shape.dd)
    for start in range(0, points.shape[0], EVAL_CHUNK):
        part = slice(start, start + EVAL_CHUNK)
        chunk_risk, chunk_grad = _weighted_risk_and_gradient(phi, points[part], weights[part], targets[part], r)
        risk += chunk_risk
        grad += chunk_grad
    return risk, grad


def grid_resolution(d: int, resolution: Optional[int] = None) -> int:
    """
    Points per axis for a midpoint grid or for the cells of a 1-D FunctionTarget rule.

    An explicit resolution is used as given. The default starts at DEFAULT_RESOLUTION and
    is lowered until resolution**d ≤ MAX_GRID_NODES.

    Examples:
        >>> grid_resolution(1), grid_resolution(2), grid_resolution(3), grid_resolution(4)
        (256, 256, 101, 32)
        >>> grid_resolution(3, 64)
        64
    """
    if resolution is not None:
        return int(resolution)
    n = DEFAULT_RESOLUTION
    while n > 2 and n**d > MAX_GRID_NODES:
        n -= 1
    return n


def _batch_arrays(batch: EmpiricalBatch, phi: ParamVector) -> Tuple[FloatArray, FloatArray]:
    if not isinstance(batch, EmpiricalBatch):
        raise StructuralError(f"expected EmpiricalBatch, got {type(batch).__name__}")
    if batch.size < 1:
        raise StructuralError("empirical risk of an empty batch")
    if batch.d != phi.shape.d:
        raise StructuralError(f"batch has d={batch.d}, network expects d={phi.shape.d}")
    return batch.samples, np.full(batch.size, 1.0 / batch.size)


def _empirical(phi: ParamVector, batch: EmpiricalBatch, xi: float, r: Optional[int]) -> Tuple[float, FloatArray]:
    points, weights = _batch_arrays(batch, phi)
    return _weighted_risk_and_gradient(phi, points, weights, np.full(batch.size, float(xi)), r)


def empirical_risk(phi: ParamVector, batch: EmpiricalBatch, xi: float) -> float:
    """
    𝔏ⁿ_∞(φ) = (1/M) Σ_m (𝒩^φ_∞(X^{n,m}) - ξ)².

    Examples:
        >>> phi = ParamVector.from_list(1, 3, [-1, 1, 2, 2, -2, 0, 1, -1, 2, 3])
        >>> empirical_risk(phi, EmpiricalBatch.of([[2.0]]), 3.0)
        64.0
    """
    return _empirical(phi, batch, xi, None)[0]


def empirical_risk_smoothed(phi: ParamVector, batch: EmpiricalBatch, xi: float, r: int) -> float:
    """𝔏ⁿ_r(φ) with R_r in place of ReLU."""
    return _empirical(phi, batch, xi, r)[0]


def empirical_gradient(phi: ParamVector, batch: EmpiricalBatch, xi: float) -> GradientVector:
    """
    Closed-form generalized gradient 𝔊ⁿ(φ).

    Args:
        phi: 參數向量
        batch: 非空的 mini-batch
        xi: 常數目標 ξ

    Returns:
        GradientVector 𝔊ⁿ(φ)

    Examples:
        >>> phi = ParamVector.from_list(1, 3, [-1, 1, 2, 2, -2, 0, 1, -1, 2, 3])
        >>> empirical_gradient(phi, EmpiricalBatch.of([[2.0]]), 3.0).values.tolist()
        [0.0, 0.0, 64.0, 0.0, 0.0, 32.0, 0.0, 0.0, 64.0, 16.0]
    """
    return GradientVector(phi.shape, _empirical(phi, batch, xi, None)[1])


def smoothed_empirical_gradient(phi: ParamVector, batch: EmpiricalBatch, xi: float, r: int) -> GradientVector:
    """Analytic gradient ∇_φ 𝔏ⁿ_r(φ)."""
    return GradientVector(phi.shape, _empirical(phi, batch, xi, r)[1])


def empirical_risk_and_gradient(
    phi: ParamVector, batch: EmpiricalBatch, xi: float
) -> Tuple[float, GradientVector]:
    """(𝔏ⁿ_∞(φ), 𝔊ⁿ(φ)) from a single pass over the batch."""
    risk, grad = _empirical(phi, batch, xi, None)
    return risk, GradientVector(phi.shape, grad)


def gradient_limit_gap(phi: ParamVector, batch: EmpiricalBatch, xi: float, r: int) -> float:
    """‖∇𝔏ⁿ_r(φ) - 𝔊ⁿ(φ)‖."""
    smoothed = _empirical(phi, batch, xi, r)[1]
    closed = _empirical(phi, batch, xi, None)[1]
    return float(np.linalg.norm(smoothed - closed))


def finite_difference_gradient(
    phi: ParamVector,
    batch: EmpiricalBatch,
    xi: float,
    r: Optional[int],
    h: float = 1e-6,
) -> GradientVector:
    """
    Central differences of 𝔏ⁿ_r, one coordinate at a time.

    Only meaningful for finite r; with r=None the exact risk is differenced, which
    need not match 𝔊ⁿ when a pre-activation sits on a kink.
    """
    if h <= 0.0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    if r is None:
        logger.warning("finite differences of the exact ReLU risk are not a gradient oracle at kinks")
    points, weights = _batch_arrays(batch, phi)
    targets = np.full(batch.size, float(xi))
    base = phi.values.copy()
    grad = np.empty_like(base)
    for k in range(base.size):
        shifted = base.copy()
        shifted[k] = base[k] + h
        upper = _weighted_risk_and_gradient(ParamVector(phi.shape, shifted), points, weights, targets, r)[0]
        shifted[k] = base[k] - h
        lower = _weighted_risk_and_gradient(ParamVector(phi.shape, shifted), points, weights, targets, r)[0]
        grad[k] = (upper - lower) / (2.0 * h)
    return GradientVector(phi.shape, grad)


def kink_breakpoints(phi: ParamVector, a: float, b: float) -> FloatArray:
    """
    Sorted kinks -b_i/w_i of the hidden units that fall strictly inside (a, b); d = 1 only.

    Examples:
        >>> phi = ParamVector.from_list(1, 2, [1.0, -2.0, -0.5, 1.0, 1.0, 1.0, 0.0])
        >>> kink_breakpoints(phi, 0.0, 1.0).tolist()
        [0.5]
    """
    if phi.shape.d != 1:
        raise StructuralError("kink breakpoints are defined for d = 1")
    w = phi.W[:, 0]
    usable = np.abs(w) > KINK_GUARD
    if np.any(~usable & (w != 0.0)):
        logger.warning(f"kink guard dropped {int(np.sum(~usable & (w != 0.0)))} unit(s) with |w| <= {KINK_GUARD}")
    kinks = -phi.b[usable] / w[usable]
    kinks = kinks[(kinks > a) & (kinks < b)]
    return np.unique(kinks)


def integration_rule(
    phi: ParamVector,
    dist: InputDistribution,
    target: TargetSpec,
    resolution: Optional[int] = None,
) -> IntegrationRule:
    """
    Pick the integration backend for μ.

    - DiscreteFinite: the weighted support itself (exact).
    - UniformBox, d = 1: Gauss–Legendre on the pieces between kinks. Exact for constant
      targets; for a FunctionTarget the pieces are further split into ``resolution``
      equal cells and the result is flagged approximate.
    - UniformBox, d ≥ 2: midpoint grid with ``resolution`` points per axis (approximate).

    ``resolution=None`` picks grid_resolution(d), so the default grid never exceeds
    MAX_GRID_NODES nodes.
    """
    resolution = grid_resolution(dist.d, resolution)
    if dist.d != phi.shape.d:
        raise StructuralError(f"distribution has d={dist.d}, network expects d={phi.shape.d}")
    if isinstance(dist, DiscreteFinite):
        return discrete_rule(dist)
    if not isinstance(dist, UniformBox):
        raise StructuralError(f"unsupported distribution {type(dist).__name__}")
    if dist.d == 1:
        kinks = kink_breakpoints(phi, dist.a, dist.b)
        if isinstance(target, ConstantTarget):
            return gauss_legendre_rule(dist, kinks)
        cells = np.linspace(dist.a, dist.b, resolution + 1)[1:-1]
        rule = gauss_legendre_rule(dist, np.union1d(kinks, cells))
        return IntegrationRule(rule.nodes, rule.weights, exact=False, method=rule.method, resolution=resolution)
    nodes = resolution**dist.d
    if nodes > MAX_GRID_NODES:
        logger.warning(f"midpoint grid {resolution}^{dist.d} = {nodes} nodes exceeds the default cap {MAX_GRID_NODES}")
    else:
        logger.debug(f"midpoint grid {resolution}^{dist.d} for d={dist.d}")
    return quadrature_grid(dist, resolution)


def evaluate_true(
    phi: ParamVector,
    dist: InputDistribution,
    target: Union[TargetSpec, float],
    resolution: Optional[int] = None,
    r: Optional[int] = None,
) -> TrueEvaluation:
    """𝓛(φ) and 𝒢(φ) (or 𝓛_r, ∇𝓛_r for finite r) in one pass over the integration rule."""
    target = as_target(target)
    rule = integration_rule(phi, dist, target, resolution)
    risk, grad = _chunked_risk_and_gradient(phi, rule.nodes, rule.weights, target(rule.nodes), r)
    # R_r 不是分段多項式，因此平滑版本永遠標示為近似
    exact = rule.exact and r is None
    return TrueEvaluation(
        risk=max(risk, 0.0),
        gradient=GradientVector(phi.shape, grad),
        exact=exact,
        method=rule.method,
        resolution=rule.resolution,
    )


def true_risk(
    phi: ParamVector,
    dist: InputDistribution,
    target: Union[TargetSpec, float],
    resolution: Optional[int] = None,
) -> float:
    """
    𝓛_∞(φ) = ∫ (𝒩^φ_∞(x) - f(x))² μ(dx).

    Examples:
        >>> phi = ParamVector.from_list(1, 1, [1.0, -0.5, 1.0, 0.0])
        >>> round(true_risk(phi, UniformBox(0.0, 1.0, 1), 0.0), 12)
        0.041666666667
    """
    return evaluate_true(phi, dist, target, resolution).risk


def true_gradient(
    phi: ParamVector,
    dist: InputDistribution,
    target: Union[TargetSpec, float],
    resolution: Optional[int] = None,
) -> GradientVector:
    """Generalized true-risk gradient 𝒢(φ)."""
    return evaluate_true(phi, dist, target, resolution).gradient


def true_risk_smoothed(
    phi: ParamVector,
    dist: InputDistribution,
    target: Union[TargetSpec, float],
    r: int,
    resolution: Optional[int] = None,
) -> float:
    """𝓛_r(φ) on the same integration rule as the exact risk."""
    return evaluate_true(phi, dist, target, resolution, r=r).risk


def true_gradient_smoothed(
    phi: ParamVector,
    dist: InputDistribution,
    target: Union[TargetSpec, float],
    r: int,
    resolution: Optional[int] = None,
) -> GradientVector:
    """∇𝓛_r(φ) on the same integration rule as the exact risk."""
    return evaluate_true(phi, dist, target, resolution, r=r).gradient


def exact_fit(shape: NetworkShape, xi: float) -> ParamVector:
    """The parameter with w = b = v = 0 and c = ξ, so 𝒩 ≡ ξ."""
    values = np.zeros(shape.dd)
    values[shape.c_index] = xi
    return ParamVector(shape, values)
