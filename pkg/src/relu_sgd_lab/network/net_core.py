"""Parameter layout and forward evaluation of the one-hidden-layer ReLU network.

參數向量 φ 的排列 (文件使用 1-based 索引，內部儲存為 0-based):

    w_{i,j} = φ[(i-1)d + j]   ->  values[(i-1)*d + (j-1)]
    b_i     = φ[Hd + i]       ->  values[H*d + (i-1)]
    v_i     = φ[H(d+1) + i]   ->  values[H*(d+1) + (i-1)]
    c       = φ[dd]           ->  values[dd-1]
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from relu_sgd_lab.network.smooth_relu import value as smooth_value

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

# 單一輸入點 x = (x_1, ..., x_d)
InputPoint = FloatArray

Activation = Callable[[FloatArray], FloatArray]


class StructuralError(ValueError):
    """Shape or layout mismatch between parameters, inputs, and distributions."""


@dataclass(frozen=True)
class NetworkShape:
    """Dimensions (d, H, dd) of the network; dd = d*H + 2*H + 1."""

    d: int
    H: int
    dd: Optional[int] = None

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise StructuralError(f"input dimension d must be a positive integer, got {self.d}")
        if int(self.H) != self.H or self.H < 1:
            raise StructuralError(f"hidden width H must be a positive integer, got {self.H}")
        expected = self.d * self.H + 2 * self.H + 1
        if self.dd is None:
            object.__setattr__(self, "dd", expected)
        elif self.dd != expected:
            raise StructuralError(
                f"dd={self.dd} does not match d*H + 2*H + 1 = {expected} for d={self.d}, H={self.H}"
            )

    @property
    def b_offset(self) -> int:
        return self.H * self.d

    @property
    def v_offset(self) -> int:
        return self.H * (self.d + 1)

    @property
    def c_index(self) -> int:
        return self.dd - 1


@dataclass(frozen=True, eq=False)
class ParamVector:
    """The flat parameter φ ∈ R^dd together with its shape.

    The stored array is read-only; ``W``, ``b``, ``v`` and ``c`` are views into it.
    """

    shape: NetworkShape
    values: FloatArray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if values.size != self.shape.dd:
            raise StructuralError(
                f"parameter vector has {values.size} entries, shape {self.shape} needs {self.shape.dd}"
            )
        if not np.all(np.isfinite(values)):
            raise StructuralError("parameter vector contains NaN or Inf")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_list(cls, d: int, H: int, values: ArrayLike) -> "ParamVector":
        return cls(NetworkShape(d, H), np.asarray(values, dtype=np.float64))

    @classmethod
    def zeros(cls, shape: NetworkShape) -> "ParamVector":
        return cls(shape, np.zeros(shape.dd))

    @property
    def W(self) -> FloatArray:
        return self.values[: self.shape.b_offset].reshape(self.shape.H, self.shape.d)

    @property
    def b(self) -> FloatArray:
        return self.values[self.shape.b_offset : self.shape.v_offset]

    @property
    def v(self) -> FloatArray:
        return self.values[self.shape.v_offset : self.shape.c_index]

    @property
    def c(self) -> float:
        return float(self.values[self.shape.c_index])

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def moved(self, direction: ArrayLike, step: float) -> "ParamVector":
        """Return φ - step * direction."""
        return ParamVector(self.shape, self.values - step * np.asarray(direction, dtype=np.float64))

    def __len__(self) -> int:
        return self.shape.dd


def unpack(phi: ParamVector) -> Tuple[FloatArray, FloatArray, FloatArray, float]:
    """
    將 φ 拆成 (W, b, v, c) 視圖。

    Args:
        phi: 參數向量

    Returns:
        (W: H×d, b: H, v: H, c: scalar)

    Examples:
        >>> W, b, v, c = unpack(ParamVector.from_list(1, 3, [-1, 1, 2, 2, -2, 0, 1, -1, 2, 3]))
        >>> W.ravel().tolist(), b.tolist(), v.tolist(), c
        ([-1.0, 1.0, 2.0], [2.0, -2.0, 0.0], [1.0, -1.0, 2.0], 3.0)
    """
    if not isinstance(phi, ParamVector):
        raise StructuralError(f"expected ParamVector, got {type(phi).__name__}")
    return phi.W, phi.b, phi.v, phi.c


def pack(
    W: ArrayLike, b: ArrayLike, v: ArrayLike, c: float, shape: Optional[NetworkShape] = None
) -> ParamVector:
    """Flatten (W, b, v, c) back into a ParamVector; inverse of ``unpack``."""
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if shape is None:
        shape = NetworkShape(W.shape[1], W.shape[0])
    if W.shape != (shape.H, shape.d) or b.size != shape.H or v.size != shape.H:
        raise StructuralError(
            f"blocks W{W.shape}, b({b.size}), v({v.size}) do not fit shape d={shape.d}, H={shape.H}"
        )
    return ParamVector(shape, np.concatenate([W.reshape(-1), b, v, [float(c)]]))


def as_points(x: ArrayLike, d: int) -> Tuple[FloatArray, bool]:
    """
    把單一點或點集合整理成 (M, d) 陣列。

    Returns:
        (points, single)；single 為 True 時呼叫端應回傳純量
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim == 1:
        if arr.size != d:
            raise StructuralError(f"input point has {arr.size} coordinates, network expects d={d}")
        return arr.reshape(1, d), True
    if arr.ndim == 2 and arr.shape[1] == d:
        return arr, False
    raise StructuralError(f"inputs of shape {arr.shape} do not match d={d}")


def pre_activations(phi: ParamVector, points: FloatArray) -> FloatArray:
    """b_i + Σ_j w_{i,j} x_j for every point (rows) and hidden unit (columns)."""
    return points @ phi.W.T + phi.b


def relu(y: FloatArray) -> FloatArray:
    return np.maximum(y, 0.0)


def realize(phi: ParamVector, x: ArrayLike, activation: Activation) -> Union[float, FloatArray]:
    """c + Σ_i v_i · activation(pre-activation_i) for one point or a batch of points."""
    points, single = as_points(x, phi.shape.d)
    out = phi.c + activation(pre_activations(phi, points)) @ phi.v
    return float(out[0]) if single else out


def realize_exact(phi: ParamVector, x: ArrayLike) -> Union[float, FloatArray]:
    """
    Realization 𝒩^φ_∞(x) with the exact ReLU activation.

    Examples:
        >>> phi = ParamVector.from_list(1, 3, [-1, 1, 2, 2, -2, 0, 1, -1, 2, 3])
        >>> realize_exact(phi, [2.0])
        11.0
    """
    return realize(phi, x, relu)


def realize_smoothed(phi: ParamVector, x: ArrayLike, r: int) -> Union[float, FloatArray]:
    """Realization 𝒩^φ_r(x) with the smooth activation R_r in place of ReLU."""
    return realize(phi, x, lambda y: smooth_value(r, y))


def active_mask(phi: ParamVector, points: FloatArray) -> FloatArray:
    """1_{I_i^φ}(x) for every point and unit; a pre-activation of exactly 0 is inactive."""
    return (pre_activations(phi, points) > 0.0).astype(np.float64)


def active_indicator(phi: ParamVector, i: int, x: ArrayLike) -> bool:
    """
    判斷第 i 個隱藏神經元 (1-based) 在 x 是否為 active (嚴格 > 0)。

    Examples:
        >>> phi = ParamVector.from_list(1, 3, [-1, 1, 2, 2, -2, 0, 1, -1, 2, 3])
        >>> active_indicator(phi, 1, [2.0]), active_indicator(phi, 3, [2.0])
        (False, True)
    """
    if not 1 <= i <= phi.shape.H:
        raise StructuralError(f"hidden index i={i} outside 1..{phi.shape.H}")
    points, single = as_points(x, phi.shape.d)
    if not single:
        raise StructuralError("active_indicator takes a single input point")
    return bool(pre_activations(phi, points)[0, i - 1] > 0.0)


def random_params(
    shape: NetworkShape, rng: np.random.Generator, low: float = -1.0, high: float = 1.0
) -> ParamVector:
    """φ with entries drawn uniformly from [low, high]."""
    return ParamVector(shape, rng.uniform(low, high, size=shape.dd))


def lipschitz_constant(phi: ParamVector, psi: ParamVector, a: float, b: float) -> float:
    """
    Explicit constant 2·𝐚·(d+1)(H+1)·max{1, ‖φ‖, ‖ψ‖} bounding
    sup_x |𝒩^φ(x) - 𝒩^ψ(x)| / ‖φ - ψ‖ on [a, b]^d.
    """
    if phi.shape != psi.shape:
        raise StructuralError(f"shapes differ: {phi.shape} vs {psi.shape}")
    shape = phi.shape
    a_param = max(abs(a), abs(b), 1.0)
    return 2.0 * a_param * (shape.d + 1) * (shape.H + 1) * max(1.0, phi.norm(), psi.norm())


def sup_gap(phi: ParamVector, psi: ParamVector, points: FloatArray) -> float:
    """max over the given points of |𝒩^φ_∞(x) - 𝒩^ψ_∞(x)|."""
    return float(np.max(np.abs(realize_exact(phi, points) - realize_exact(psi, points))))
