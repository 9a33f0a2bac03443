"""Smooth ReLU approximations R_r(x) = r⁻¹ ln(1 + r⁻¹ e^{rx}) and their derivatives."""

import math
from typing import List, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import expit

Real = Union[float, NDArray[np.float64]]


def _check_index(r: int) -> None:
    if int(r) != r or r < 1:
        raise ValueError(f"approximation index r must be a positive integer, got {r}")


def _shifted(r: int, x: ArrayLike) -> NDArray[np.float64]:
    # r·x - ln r：把 r⁻¹ 移進指數，避免 e^{rx} 溢位
    return r * np.asarray(x, dtype=np.float64) - math.log(r)


def _scalar_or_array(out: NDArray[np.float64], x: ArrayLike) -> Real:
    return float(out) if np.ndim(x) == 0 else out


def value(r: int, x: ArrayLike) -> Real:
    """
    R_r(x) = r⁻¹·softplus(r·x - ln r).

    Args:
        r: approximation index (r ≥ 1)
        x: scalar or array of finite reals

    Returns:
        R_r(x), same shape as x

    Examples:
        >>> round(value(1, 0.0), 6)
        0.693147
    """
    _check_index(r)
    # logaddexp(0, u) = max(u, 0) + log1p(e^{-|u|})
    return _scalar_or_array(np.logaddexp(0.0, _shifted(r, x)) / r, x)


def derivative(r: int, x: ArrayLike) -> Real:
    """(R_r)'(x) = e^{rx} / (r + e^{rx}) = logistic(r·x - ln r); always in (0, 1)."""
    _check_index(r)
    return _scalar_or_array(expit(_shifted(r, x)), x)


def limit_profile(x: float, r_list: Sequence[int]) -> List[Tuple[float, float]]:
    """
    每個 r 的 (|R_r(x) - max{x,0}|, |R_r'(x) - 1_{(0,∞)}(x)|)。

    Examples:
        >>> [round(g, 4) for g, _ in limit_profile(1.0, [1, 10, 100])]
        [0.3133, 0.2302, 0.0461]
    """
    rs = [int(r) for r in r_list]
    if any(later <= earlier for earlier, later in zip(rs, rs[1:])):
        raise ValueError(f"r_list must be strictly increasing, got {rs}")
    relu_x = max(x, 0.0)
    step_x = 1.0 if x > 0.0 else 0.0
    return [(abs(value(r, x) - relu_x), abs(derivative(r, x) - step_x)) for r in rs]


def monotone_onset(x: float) -> int:
    """
    Smallest power of two r₀ such that both gaps of ``limit_profile`` are nonincreasing
    along r₀, 2r₀, 4r₀, ...

    For x ≤ 0 both gaps decrease from r = 1. For x > 0 the value gap changes sign when the
    unit switches on, so the tail starts once r ≥ 8 and r·x ≥ ln(2r) + 1.
    """
    if x <= 0.0:
        return 1
    r = 8
    while r * x < math.log(2 * r) + 1.0:
        r *= 2
    return r
