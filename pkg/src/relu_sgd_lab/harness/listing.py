"""Reference instance: d=1, H=3, one sample, closed-form gradient checked coordinate by coordinate."""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from relu_sgd_lab.network.net_core import ParamVector, pre_activations, realize_exact
from relu_sgd_lab.risk.lyapunov import descent_identity, lyapunov_value, pairing_identity
from relu_sgd_lab.risk.risk_engine import empirical_risk_and_gradient
from relu_sgd_lab.sampling.input_model import EmpiricalBatch

LISTING_D = 1
LISTING_H = 3
LISTING_PHI: Tuple[float, ...] = (-1.0, 1.0, 2.0, 2.0, -2.0, 0.0, 1.0, -1.0, 2.0, 3.0)
LISTING_XI = 3.0
LISTING_X = 2.0
LISTING_GAMMA = 0.001

GOLDEN_GRADIENT: Dict[str, Tuple[float, ...]] = {
    "w": (0.0, 0.0, 64.0),
    "b": (0.0, 0.0, 32.0),
    "v": (0.0, 0.0, 64.0),
    "c": (16.0,),
}


@dataclass(frozen=True)
class CoordinateDiff:
    group: str
    index: int
    expected: float
    actual: float


@dataclass
class ListingReport:
    xi: float
    x: float
    pre_activations: List[float]
    output: float
    risk: float
    gradient: Dict[str, List[float]]
    V: float
    pairing: float
    descent_lhs: float
    descent_rhs: float
    diffs: List[CoordinateDiff] = field(default_factory=list)

    @property
    def golden(self) -> bool:
        return not self.diffs

    @property
    def default_inputs(self) -> bool:
        return self.xi == LISTING_XI and self.x == LISTING_X

    def to_dict(self) -> dict:
        return {
            "xi": self.xi,
            "x": self.x,
            "golden": self.golden,
            "pre_activations": self.pre_activations,
            "output": self.output,
            "risk": self.risk,
            "gradient": self.gradient,
            "V": self.V,
            "pairing": self.pairing,
            "descent": {"gamma": LISTING_GAMMA, "lhs": self.descent_lhs, "rhs": self.descent_rhs},
            "diffs": [
                {"group": d.group, "index": d.index, "expected": d.expected, "actual": d.actual}
                for d in self.diffs
            ],
        }


def listing_params() -> ParamVector:
    return ParamVector.from_list(LISTING_D, LISTING_H, LISTING_PHI)


def gradient_groups(grad: ParamVector) -> Dict[str, List[float]]:
    """Split a gradient into its w / b / v / c groups."""
    return {
        "w": [float(g) for g in grad.W.reshape(-1)],
        "b": [float(g) for g in grad.b],
        "v": [float(g) for g in grad.v],
        "c": [float(grad.c)],
    }


def build_listing_report(xi: float = LISTING_XI, x: float = LISTING_X) -> ListingReport:
    """
    計算參考實例的梯度並與 golden 值逐一比對 (雙精度完全相等)。

    Examples:
        >>> build_listing_report().golden
        True
        >>> build_listing_report(xi=0.0).gradient["c"]
        [22.0]
    """
    phi = listing_params()
    batch = EmpiricalBatch.of([[x]])
    risk, grad = empirical_risk_and_gradient(phi, batch, xi)
    groups = gradient_groups(grad)
    diffs = [
        CoordinateDiff(name, i, expected, actual)
        for name, golden in GOLDEN_GRADIENT.items()
        for i, (expected, actual) in enumerate(zip(golden, groups[name]))
        if expected != actual
    ]
    pairing = pairing_identity(phi, batch, xi)
    descent = descent_identity(phi, LISTING_GAMMA, batch, xi)
    return ListingReport(
        xi=float(xi),
        x=float(x),
        pre_activations=[float(p) for p in pre_activations(phi, batch.samples)[0]],
        output=float(realize_exact(phi, [x])),
        risk=risk,
        gradient=groups,
        V=lyapunov_value(phi, xi),
        pairing=pairing.pairing,
        descent_lhs=descent.descent_lhs,
        descent_rhs=descent.descent_rhs,
        diffs=diffs,
    )
