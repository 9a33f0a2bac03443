"""Input distribution μ on [a, b]^d: reproducible batch sampling and integration rules."""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import roots_legendre

from relu_sgd_lab.network.net_core import StructuralError

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

_MASK64 = (1 << 64) - 1

# Philox key 的高 64 位元用來分隔互相獨立的亂數用途
DATA_CHANNEL = 0
INIT_CHANNEL = 1
VERIFY_CHANNEL = 2


def substream(seed: int, channel: int, index: int) -> np.random.Generator:
    """
    Counter-based generator for (seed, channel, index).

    The key carries the seed and the channel, the upper 128 counter bits carry the
    index, so every (seed, channel, index) triple owns a disjoint, reproducible stream.
    """
    if seed < 0 or index < 0:
        raise ValueError(f"seed and index must be nonnegative, got seed={seed}, index={index}")
    key = (int(seed) & _MASK64) | (int(channel) << 64)
    bit_generator = np.random.Philox(key=key, counter=int(index) << 128)
    return np.random.Generator(bit_generator)


@dataclass(frozen=True, eq=False)
class UniformBox:
    """Uniform distribution on [a, b]^d."""

    a: float
    b: float
    d: int

    def __post_init__(self):
        _check_box(self.a, self.b, self.d)

    @property
    def a_param(self) -> float:
        """𝐚 = max{|a|, |b|, 1}."""
        return max(abs(self.a), abs(self.b), 1.0)

    def draw(self, rng: np.random.Generator, count: int) -> FloatArray:
        return rng.uniform(self.a, self.b, size=(count, self.d))


@dataclass(frozen=True, eq=False)
class DiscreteFinite:
    """Finite distribution Σ_k weights[k]·δ_{points[k]} supported in [a, b]^d."""

    a: float
    b: float
    points: FloatArray = field(repr=False)
    weights: FloatArray = field(repr=False)

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        weights = np.array(self.weights, dtype=np.float64).reshape(-1)
        if points.ndim != 2 or points.shape[0] == 0:
            raise StructuralError(f"discrete support must be a nonempty (K, d) array, got {points.shape}")
        _check_box(self.a, self.b, points.shape[1])
        if weights.size != points.shape[0]:
            raise StructuralError(f"{weights.size} weights for {points.shape[0]} support points")
        if np.any(weights < 0.0) or abs(weights.sum() - 1.0) > 1e-12:
            raise StructuralError(f"weights must be nonnegative and sum to 1, got sum {weights.sum()!r}")
        if np.any(points < self.a) or np.any(points > self.b):
            raise StructuralError(f"support points leave the box [{self.a}, {self.b}]^d")
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def point_mass(cls, point: ArrayLike, a: float, b: float) -> "DiscreteFinite":
        return cls(a, b, np.atleast_2d(np.asarray(point, dtype=np.float64)), np.ones(1))

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    @property
    def a_param(self) -> float:
        return max(abs(self.a), abs(self.b), 1.0)

    def draw(self, rng: np.random.Generator, count: int) -> FloatArray:
        # 每個樣本只消耗一個 uniform，反查累積權重
        cumulative = np.cumsum(self.weights)
        idx = np.searchsorted(cumulative, rng.random(count), side="right")
        return self.points[np.minimum(idx, len(self.weights) - 1)]


InputDistribution = Union[UniformBox, DiscreteFinite]


def _check_box(a: float, b: float, d: int) -> None:
    if not (np.isfinite(a) and np.isfinite(b)) or not b > a:
        raise StructuralError(f"need finite a < b, got a={a}, b={b}")
    if int(d) != d or d < 1:
        raise StructuralError(f"dimension d must be a positive integer, got {d}")


@dataclass(frozen=True, eq=False)
class EmpiricalBatch:
    """Mini-batch {X^{n,1}, ..., X^{n,M}} of step n, stored as an (M, d) array."""

    step_index: int
    samples: FloatArray = field(repr=False)

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples.reshape(-1, 1)
        if samples.ndim != 2 or samples.shape[0] < 1:
            raise StructuralError("an empirical batch needs at least one sample")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def of(cls, points: ArrayLike, step_index: int = 0) -> "EmpiricalBatch":
        return cls(step_index, np.atleast_2d(np.asarray(points, dtype=np.float64)))

    @property
    def size(self) -> int:
        return int(self.samples.shape[0])

    @property
    def d(self) -> int:
        return int(self.samples.shape[1])


def sample_batch(dist: InputDistribution, n: int, M: int, seed: int) -> EmpiricalBatch:
    """
    抽取第 n 步的 M 個 i.i.d. 樣本。

    Row m of the result depends only on (seed, n, m): batch n owns its own Philox
    stream and sample m consumes the m-th block of draws, so a smaller batch is a
    prefix of a larger one.

    Args:
        dist: input distribution
        n: step index
        M: batch size (M ≥ 1)
        seed: 64-bit seed

    Returns:
        EmpiricalBatch with M samples inside [a, b]^d
    """
    if M < 1:
        raise StructuralError(f"batch size must be at least 1, got {M}")
    rng = substream(seed, DATA_CHANNEL, n)
    return EmpiricalBatch(n, dist.draw(rng, M))


@dataclass(frozen=True, eq=False)
class IntegrationRule:
    """Nodes and normalized weights approximating (or representing exactly) μ."""

    nodes: FloatArray = field(repr=False)
    weights: FloatArray = field(repr=False)
    exact: bool
    method: str
    resolution: Optional[int] = None

    def __iter__(self) -> Iterator[Tuple[FloatArray, float]]:
        return ((node, float(w)) for node, w in zip(self.nodes, self.weights))

    def __len__(self) -> int:
        return int(self.weights.size)

    def metadata(self) -> dict:
        return {"method": self.method, "exact": self.exact, "resolution": self.resolution}


@lru_cache(maxsize=8)
def _legendre(order: int) -> Tuple[FloatArray, FloatArray]:
    nodes, weights = roots_legendre(order)
    return np.asarray(nodes), np.asarray(weights)


def _check_breakpoints(dist: UniformBox, breakpoints: Sequence[float]) -> FloatArray:
    if not isinstance(dist, UniformBox) or dist.d != 1:
        raise StructuralError("piecewise Gauss-Legendre integration needs a 1-dimensional UniformBox")
    points = np.asarray(breakpoints, dtype=np.float64).reshape(-1)
    if np.any(np.diff(points) < 0.0):
        raise StructuralError(f"breakpoints must be sorted, got {points.tolist()}")
    if np.any(points < dist.a) or np.any(points > dist.b):
        raise StructuralError(f"breakpoints {points.tolist()} leave [{dist.a}, {dist.b}]")
    return points


def gauss_legendre_rule(dist: UniformBox, breakpoints: Sequence[float], order: int = 3) -> IntegrationRule:
    """
    Composite Gauss–Legendre rule on [a, b] split at the breakpoints, weights normalized by
    the uniform density 1/(b - a). With order 3 it integrates piecewise quadratics exactly.
    """
    points = _check_breakpoints(dist, breakpoints)
    edges = np.concatenate([[dist.a], points, [dist.b]])
    left, right = edges[:-1], edges[1:]
    keep = right > left
    left, right = left[keep], right[keep]
    ref_nodes, ref_weights = _legendre(order)
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = (mid[:, None] + half[:, None] * ref_nodes[None, :]).reshape(-1, 1)
    weights = (half[:, None] * ref_weights[None, :]).reshape(-1) / (dist.b - dist.a)
    return IntegrationRule(nodes, weights, exact=True, method=f"gauss-legendre-{order}")


def expectation_1d_piecewise(
    dist: UniformBox,
    breakpoints: Sequence[float],
    piece_evaluator: Callable[[FloatArray], FloatArray],
) -> float:
    """
    ∫ g dμ for μ uniform on [a, b] and g polynomial of degree ≤ 2 between breakpoints.

    Args:
        dist: 1-dimensional UniformBox
        breakpoints: sorted points inside [a, b]
        piece_evaluator: vectorized x ↦ g(x), x an (K,) array

    Returns:
        the exact expectation (up to rounding)

    Examples:
        >>> box = UniformBox(0.0, 1.0, 1)
        >>> round(expectation_1d_piecewise(box, [0.5], lambda x: (x - 0.5) ** 2 * (x > 0.5)), 7)
        0.0416667
    """
    rule = gauss_legendre_rule(dist, breakpoints)
    values = np.asarray(piece_evaluator(rule.nodes[:, 0]), dtype=np.float64)
    return float(values @ rule.weights)


def quadrature_grid(dist: UniformBox, resolution: int) -> IntegrationRule:
    """
    Tensor-product midpoint grid with resolution points per axis and uniform weights.

    Examples:
        >>> [float(node[0]) for node, _ in quadrature_grid(UniformBox(0.0, 1.0, 1), 4)]
        [0.125, 0.375, 0.625, 0.875]
    """
    if not isinstance(dist, UniformBox):
        raise StructuralError("midpoint grids are defined for UniformBox distributions")
    if resolution < 2:
        raise StructuralError(f"resolution must be at least 2, got {resolution}")
    h = (dist.b - dist.a) / resolution
    axis = dist.a + h * (np.arange(resolution) + 0.5)
    mesh = np.meshgrid(*([axis] * dist.d), indexing="ij")
    nodes = np.stack([m.reshape(-1) for m in mesh], axis=1)
    weights = np.full(nodes.shape[0], 1.0 / nodes.shape[0])
    return IntegrationRule(
        nodes, weights, exact=False, method="midpoint-grid", resolution=int(resolution)
    )


def discrete_rule(dist: DiscreteFinite) -> IntegrationRule:
    """The distribution itself as an exact rule."""
    return IntegrationRule(dist.points, dist.weights, exact=True, method="discrete")
