"""
Randomized property suites: identities, bounds, limits.

Every property has a generator that turns a numpy Generator into a JSON-serializable
instance and a checker that takes only that instance, so a failing instance can be
written to disk and replayed on its own.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from relu_sgd_lab.network import smooth_relu
from relu_sgd_lab.network.net_core import (
    ParamVector,
    lipschitz_constant,
    pre_activations,
    realize_exact,
    realize_smoothed,
    sup_gap,
)
from relu_sgd_lab.risk.lyapunov import (
    descent_identity,
    descent_identity_true,
    lyapunov_gradient,
    lyapunov_value,
    one_step_bound,
    pairing_identity,
    pairing_identity_general,
    pairing_identity_true,
    sandwich_bounds,
    step_bound_A,
    step_bound_V,
)
from relu_sgd_lab.risk.risk_engine import (
    FunctionTarget,
    empirical_gradient,
    empirical_risk,
    evaluate_true,
    finite_difference_gradient,
    gradient_limit_gap,
    smoothed_empirical_gradient,
    true_gradient,
    true_gradient_smoothed,
    true_risk,
)
from relu_sgd_lab.sampling.input_model import (
    VERIFY_CHANNEL,
    DiscreteFinite,
    EmpiricalBatch,
    UniformBox,
    quadrature_grid,
    sample_batch,
    substream,
)

logger = logging.getLogger(__name__)

SUITES = ("identities", "bounds", "limits")

IDENTITY_TOL = 1e-9
BOUND_SLACK = 1e-12
FD_STEP = 1e-6
FD_TOL = 1e-5
GAP_FINAL_TOL = 1e-6
UNBIASED_SAMPLES = 10_000
UNBIASED_SIGMAS = 4.0


@dataclass
class CheckResult:
    passed: bool
    detail: str = ""
    values: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Property:
    """One randomized property: instance generator plus instance checker."""

    name: str
    suite: str
    description: str
    generate: Callable[[np.random.Generator], dict]
    check: Callable[[dict], CheckResult]
    max_trials: Optional[int] = None


@dataclass
class PropertyOutcome:
    name: str
    suite: str
    trials: int
    passed: int
    falsifying: List[str] = field(default_factory=list)
    first_detail: str = ""

    @property
    def ok(self) -> bool:
        return self.passed == self.trials


@dataclass
class SuiteReport:
    suite: str
    seed: int
    requested_trials: int
    outcomes: List[PropertyOutcome] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(outcome.ok for outcome in self.outcomes)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.requested_trials,
            "passed": self.ok,
            "properties": [
                {
                    "name": o.name,
                    "suite": o.suite,
                    "trials": o.trials,
                    "passed": o.passed,
                    "falsifying": o.falsifying,
                    "detail": o.first_detail,
                }
                for o in self.outcomes
            ],
        }


# ----------------------------------------------------------------------------
# instance helpers
# ----------------------------------------------------------------------------


def _floats(values) -> List[float]:
    return [float(v) for v in np.asarray(values, dtype=np.float64).reshape(-1)]


def _points(values) -> List[List[float]]:
    return [[float(v) for v in row] for row in np.atleast_2d(np.asarray(values, dtype=np.float64))]


def _random_box(rng: np.random.Generator) -> Dict[str, float]:
    a = float(rng.uniform(-2.0, 1.0))
    return {"a": a, "b": a + float(rng.uniform(0.5, 3.0))}


def _random_phi(rng: np.random.Generator, d: int, H: int, radius_max: float = 10.0) -> List[float]:
    dd = d * H + 2 * H + 1
    direction = rng.uniform(-1.0, 1.0, size=dd)
    scale = rng.uniform(0.0, radius_max) / max(np.linalg.norm(direction), 1e-300)
    return _floats(direction * scale)


def _network_instance(rng: np.random.Generator, d_max: int = 3, h_max: int = 16, m_max: int = 64) -> dict:
    d = int(rng.integers(1, d_max + 1))
    H = int(rng.integers(1, h_max + 1))
    M = int(rng.integers(1, m_max + 1))
    box = _random_box(rng)
    return {
        "d": d,
        "H": H,
        **box,
        "phi": _random_phi(rng, d, H),
        "batch": _points(rng.uniform(box["a"], box["b"], size=(M, d))),
        "xi": float(rng.uniform(-3.0, 3.0)),
    }


def _phi(inst: dict, key: str = "phi") -> ParamVector:
    return ParamVector.from_list(inst["d"], inst["H"], inst[key])


def _batch(inst: dict) -> EmpiricalBatch:
    return EmpiricalBatch.of(inst["batch"])


def _uniform(inst: dict) -> UniformBox:
    return UniformBox(inst["a"], inst["b"], inst["d"])


def _nonincreasing(seq: Sequence[float], slack: float = BOUND_SLACK) -> bool:
    return all(later <= earlier + slack * max(1.0, abs(earlier)) for earlier, later in zip(seq, seq[1:]))


# ----------------------------------------------------------------------------
# identities
# ----------------------------------------------------------------------------


def _check_pairing(inst: dict) -> CheckResult:
    report = pairing_identity(_phi(inst), _batch(inst), inst["xi"])
    values = {"pairing": report.pairing, "eight_risk": report.eight_risk}
    return CheckResult(report.pairing_holds(IDENTITY_TOL), f"|pairing - 8 risk| = {report.pairing_gap!r}", values)


def _gen_descent(rng: np.random.Generator) -> dict:
    inst = _network_instance(rng)
    inst["gamma"] = float(rng.uniform(0.0, 0.1))
    return inst


def _check_descent(inst: dict) -> CheckResult:
    report = descent_identity(_phi(inst), inst["gamma"], _batch(inst), inst["xi"])
    values = {"lhs": report.descent_lhs, "rhs": report.descent_rhs}
    return CheckResult(report.descent_holds(IDENTITY_TOL), f"lhs - rhs = {report.descent_residual!r}", values)


def _gen_true_1d(rng: np.random.Generator) -> dict:
    H = int(rng.integers(1, 9))
    box = _random_box(rng)
    return {"d": 1, "H": H, **box, "phi": _random_phi(rng, 1, H), "xi": float(rng.uniform(-3.0, 3.0))}


def _check_pairing_true(inst: dict) -> CheckResult:
    report = pairing_identity_true(_phi(inst), _uniform(inst), inst["xi"])
    values = {"pairing": report.pairing, "eight_risk": report.eight_risk}
    return CheckResult(report.pairing_holds(IDENTITY_TOL), f"|pairing - 8 risk| = {report.pairing_gap!r}", values)


def _gen_descent_true(rng: np.random.Generator) -> dict:
    inst = _gen_true_1d(rng)
    inst["gamma"] = float(rng.uniform(0.0, 0.1))
    return inst


def _check_descent_true(inst: dict) -> CheckResult:
    report = descent_identity_true(_phi(inst), inst["gamma"], _uniform(inst), inst["xi"])
    values = {"lhs": report.descent_lhs, "rhs": report.descent_rhs}
    return CheckResult(report.descent_holds(IDENTITY_TOL), f"lhs - rhs = {report.descent_residual!r}", values)


def _poly_target(coeffs: Sequence[float]) -> FunctionTarget:
    coeffs = [float(c) for c in coeffs]
    return FunctionTarget(lambda x: np.polyval(coeffs, x[:, 0]), name=f"poly{coeffs}")


def _gen_pairing_general(rng: np.random.Generator) -> dict:
    inst = _gen_true_1d(rng)
    inst["coeffs"] = _floats(rng.uniform(-2.0, 2.0, size=int(rng.integers(1, 4))))
    return inst


def _check_pairing_general(inst: dict) -> CheckResult:
    report = pairing_identity_general(_phi(inst), _uniform(inst), _poly_target(inst["coeffs"]), resolution=32)
    values = {"pairing": report.pairing, "eight_weighted": report.eight_risk}
    return CheckResult(report.pairing_holds(IDENTITY_TOL), f"|pairing - 8 weighted| = {report.pairing_gap!r}", values)


def _check_lyapunov_fd(inst: dict) -> CheckResult:
    phi = _phi(inst)
    grad = lyapunov_gradient(phi, inst["xi"]).values
    worst = 0.0
    for k in range(len(phi)):
        step = np.zeros(len(phi))
        step[k] = FD_STEP
        upper = lyapunov_value(ParamVector(phi.shape, phi.values + step), inst["xi"])
        lower = lyapunov_value(ParamVector(phi.shape, phi.values - step), inst["xi"])
        worst = max(worst, abs((upper - lower) / (2.0 * FD_STEP) - grad[k]))
    passed = worst <= 1e-6 * max(1.0, float(np.max(np.abs(grad))))
    return CheckResult(passed, f"max fd error {worst!r}", {"max_error": worst})


def _gen_point_mass(rng: np.random.Generator) -> dict:
    inst = _network_instance(rng, m_max=1)
    return inst


def _check_point_mass(inst: dict) -> CheckResult:
    phi = _phi(inst)
    point = inst["batch"][0]
    dist = DiscreteFinite.point_mass(point, inst["a"], inst["b"])
    closed = empirical_gradient(phi, _batch(inst), inst["xi"]).values
    integrated = true_gradient(phi, dist, inst["xi"]).values
    risk_gap = abs(true_risk(phi, dist, inst["xi"]) - empirical_risk(phi, _batch(inst), inst["xi"]))
    grad_gap = float(np.max(np.abs(closed - integrated)))
    passed = grad_gap <= BOUND_SLACK * (1.0 + float(np.max(np.abs(closed)))) and risk_gap <= BOUND_SLACK
    return CheckResult(passed, f"gradient gap {grad_gap!r}, risk gap {risk_gap!r}", {"grad_gap": grad_gap})


# ----------------------------------------------------------------------------
# bounds
# ----------------------------------------------------------------------------


def _gen_sandwich(rng: np.random.Generator) -> dict:
    d, H = int(rng.integers(1, 4)), int(rng.integers(1, 17))
    return {"d": d, "H": H, "phi": _random_phi(rng, d, H), "xi": float(rng.uniform(-10.0, 10.0))}


def _check_sandwich(inst: dict) -> CheckResult:
    lower, value, upper = sandwich_bounds(_phi(inst), inst["xi"])
    slack = BOUND_SLACK * max(1.0, upper)
    passed = lower <= value + slack and value <= upper + slack
    return CheckResult(passed, f"{lower!r} <= {value!r} <= {upper!r}", {"lower": lower, "V": value, "upper": upper})


def _a_param(inst: dict) -> float:
    return max(abs(inst["a"]), abs(inst["b"]), 1.0)


def _check_empirical_grad_bound(inst: dict) -> CheckResult:
    phi = _phi(inst)
    grad = empirical_gradient(phi, _batch(inst), inst["xi"])
    risk = empirical_risk(phi, _batch(inst), inst["xi"])
    lhs = float(grad.values @ grad.values)
    rhs = 4.0 * (_a_param(inst) ** 2 * (inst["d"] + 1) * phi.norm() ** 2 + 1.0) * risk
    return CheckResult(lhs <= rhs * (1.0 + BOUND_SLACK) + BOUND_SLACK, f"{lhs!r} <= {rhs!r}", {"lhs": lhs, "rhs": rhs})


def _check_true_grad_bound(inst: dict) -> CheckResult:
    phi = _phi(inst)
    evaluation = evaluate_true(phi, _uniform(inst), inst["xi"])
    lhs = float(evaluation.gradient.values @ evaluation.gradient.values)
    rhs = 4.0 * (_a_param(inst) ** 2 * 2 * phi.norm() ** 2 + 1.0) * evaluation.risk
    return CheckResult(lhs <= rhs * (1.0 + BOUND_SLACK) + BOUND_SLACK, f"{lhs!r} <= {rhs!r}", {"lhs": lhs, "rhs": rhs})


def _gen_one_step(rng: np.random.Generator) -> dict:
    inst = _network_instance(rng)
    phi = _phi(inst)
    bound = step_bound_V(phi, _a_param(inst), inst["d"], inst["xi"])
    inst["gamma"] = float(rng.uniform(0.0, 1.0) * bound)
    return inst


def _check_one_step(inst: dict) -> CheckResult:
    phi = _phi(inst)
    report = descent_identity(phi, inst["gamma"], _batch(inst), inst["xi"])
    risk = report.eight_risk / 8.0
    bound = one_step_bound(phi, inst["gamma"], risk, _a_param(inst), inst["d"], inst["xi"])
    tol = IDENTITY_TOL * (1.0 + abs(bound))
    passed = report.descent_lhs <= bound + tol and report.descent_lhs <= tol
    values = {"delta_V": report.descent_lhs, "bound": bound}
    return CheckResult(passed, f"V change {report.descent_lhs!r} vs bound {bound!r}", values)


def _gen_lipschitz(rng: np.random.Generator) -> dict:
    d, H = int(rng.integers(1, 3)), int(rng.integers(1, 9))
    radius = float(rng.uniform(0.1, 5.0))
    return {
        "d": d,
        "H": H,
        **_random_box(rng),
        "phi": _random_phi(rng, d, H, radius),
        "psi": _random_phi(rng, d, H, radius),
    }


def _check_lipschitz(inst: dict) -> CheckResult:
    phi, psi = _phi(inst), _phi(inst, "psi")
    nodes = quadrature_grid(_uniform(inst), 33 if inst["d"] == 1 else 9).nodes
    corners = np.array(np.meshgrid(*([[inst["a"], inst["b"]]] * inst["d"]), indexing="ij")).reshape(inst["d"], -1).T
    gap = sup_gap(phi, psi, np.vstack([nodes, corners]))
    limit = lipschitz_constant(phi, psi, inst["a"], inst["b"]) * float(np.linalg.norm(phi.values - psi.values))
    passed = gap <= limit * (1.0 + BOUND_SLACK) + BOUND_SLACK
    return CheckResult(passed, f"{gap!r} <= {limit!r}", {"gap": gap, "limit": limit})


def _check_bound_order(inst: dict) -> CheckResult:
    phi = _phi(inst)
    a_param = _a_param(inst)
    bound_a = step_bound_A(phi, a_param, inst["xi"], inst["d"])
    bound_v = step_bound_V(phi, a_param, inst["d"], inst["xi"])
    return CheckResult(bound_a <= bound_v, f"A-bound {bound_a!r} <= V-bound {bound_v!r}", {"A": bound_a, "V": bound_v})


def _gen_zero_set(rng: np.random.Generator) -> dict:
    inst = _gen_true_1d(rng)
    fit = bool(rng.integers(0, 2))
    inst["fit"] = fit
    if fit:
        H = inst["H"]
        w = rng.uniform(-2.0, 2.0, size=H)
        # 讓每個神經元在 [a, b] 上的 pre-activation 都 ≤ 0
        reach = np.maximum(w * inst["a"], w * inst["b"])
        b = -reach - rng.uniform(0.0, 1.0, size=H)
        v = rng.uniform(-2.0, 2.0, size=H)
        inst["phi"] = _floats(np.concatenate([w, b, v, [inst["xi"]]]))
    return inst


def _check_zero_set(inst: dict) -> CheckResult:
    evaluation = evaluate_true(_phi(inst), _uniform(inst), inst["xi"])
    grad_zero = evaluation.gradient.norm() < 1e-12
    risk_zero = evaluation.risk < 1e-12
    passed = grad_zero == risk_zero and grad_zero == inst["fit"]
    values = {"grad_norm": evaluation.gradient.norm(), "risk": evaluation.risk}
    return CheckResult(passed, f"‖G‖={values['grad_norm']!r}, risk={values['risk']!r}, fit={inst['fit']}", values)


def _gen_derivative(rng: np.random.Generator) -> dict:
    return {"r": int(rng.integers(1, 10_001)), "x": float(rng.uniform(-20.0, 20.0))}


def _check_derivative(inst: dict) -> CheckResult:
    r, x = inst["r"], inst["x"]
    value = smooth_relu.derivative(r, x)
    shifted = r * x - math.log(r)
    # |u| > 30 時 logistic 在雙精度下會貼齊 0 或 1
    passed = 0.0 < value < 1.0 if abs(shifted) <= 30.0 else 0.0 <= value <= 1.0
    return CheckResult(passed, f"R_r'({x!r}) = {value!r} for r={r}", {"derivative": value})


def _gen_unbiased(rng: np.random.Generator) -> dict:
    inst = _gen_true_1d(rng)
    inst["phi"] = _random_phi(rng, 1, inst["H"], radius_max=3.0)
    inst["sample_seed"] = int(rng.integers(0, 2**63))
    return inst


def _check_unbiased(inst: dict) -> CheckResult:
    phi, dist = _phi(inst), _uniform(inst)
    points = sample_batch(dist, 0, UNBIASED_SAMPLES, inst["sample_seed"]).samples
    # 每個樣本單獨就是 M=1 的經驗風險
    losses = (realize_exact(phi, points) - inst["xi"]) ** 2
    mean = float(np.mean(losses))
    stderr = float(np.std(losses, ddof=1) / math.sqrt(losses.size))
    exact = true_risk(phi, dist, inst["xi"])
    passed = abs(mean - exact) <= UNBIASED_SIGMAS * stderr + BOUND_SLACK
    return CheckResult(passed, f"mean {mean!r} vs exact {exact!r} (se {stderr!r})", {"mean": mean, "exact": exact})


# ----------------------------------------------------------------------------
# limits
# ----------------------------------------------------------------------------


def _gen_smooth_fd(rng: np.random.Generator) -> dict:
    return {"r": int(rng.integers(1, 101)), "x": float(rng.uniform(-10.0, 10.0))}


def _check_smooth_fd(inst: dict) -> CheckResult:
    r, x = inst["r"], inst["x"]
    fd = (smooth_relu.value(r, x + FD_STEP) - smooth_relu.value(r, x - FD_STEP)) / (2.0 * FD_STEP)
    error = abs(fd - smooth_relu.derivative(r, x))
    return CheckResult(error <= FD_TOL, f"fd error {error!r}", {"error": error})


def _gen_profile(rng: np.random.Generator) -> dict:
    sign = 1.0 if rng.integers(0, 2) else -1.0
    return {"x": sign * float(10.0 ** rng.uniform(-3.0, 1.0))}


def _check_profile(inst: dict) -> CheckResult:
    x = inst["x"]
    onset = smooth_relu.monotone_onset(x)
    profile = smooth_relu.limit_profile(x, [onset * 2**k for k in range(16)])
    gaps_v = [g for g, _ in profile]
    gaps_d = [g for _, g in profile]
    passed = _nonincreasing(gaps_v, 1e-15) and _nonincreasing(gaps_d, 1e-15)
    return CheckResult(passed, f"onset {onset}, value gaps {gaps_v[0]!r}..{gaps_v[-1]!r}", {"onset": float(onset)})


def _gen_smoothed_fd(rng: np.random.Generator) -> dict:
    d, H, M = int(rng.integers(1, 3)), int(rng.integers(1, 5)), int(rng.integers(1, 9))
    return {
        "d": d,
        "H": H,
        "a": -1.0,
        "b": 1.0,
        "phi": _floats(rng.uniform(-1.0, 1.0, size=d * H + 2 * H + 1)),
        "batch": _points(rng.uniform(-1.0, 1.0, size=(M, d))),
        "xi": float(rng.uniform(-1.0, 1.0)),
        "r": int(rng.integers(1, 101)),
    }


def _check_smoothed_fd(inst: dict) -> CheckResult:
    phi, batch = _phi(inst), _batch(inst)
    analytic = smoothed_empirical_gradient(phi, batch, inst["xi"], inst["r"]).values
    numeric = finite_difference_gradient(phi, batch, inst["xi"], inst["r"], FD_STEP).values
    error = float(np.max(np.abs(analytic - numeric)))
    scale = max(1.0, float(np.linalg.norm(analytic)))
    return CheckResult(error <= FD_TOL * scale, f"max |analytic - fd| = {error!r}", {"error": error})


def _gen_gap(rng: np.random.Generator) -> dict:
    """Small-scale instance whose pre-activations all stay at least 1e-2 away from 0."""
    for _ in range(1000):
        d, H, M = int(rng.integers(1, 3)), int(rng.integers(1, 4)), int(rng.integers(1, 5))
        dd = d * H + 2 * H + 1
        phi = rng.uniform(0.02, 0.05, size=dd) * rng.choice([-1.0, 1.0], size=dd)
        candidate = ParamVector.from_list(d, H, phi)
        rows = []
        for _ in range(200):
            x = rng.uniform(-1.0, 1.0, size=(1, d))
            if np.all(np.abs(pre_activations(candidate, x)) >= 1e-2):
                rows.append(x[0])
                if len(rows) == M:
                    break
        if len(rows) == M:
            return {
                "d": d,
                "H": H,
                "phi": _floats(phi),
                "batch": _points(rows),
                "xi": float(rng.uniform(-0.05, 0.05)),
            }
    raise RuntimeError("could not build a gradient-gap instance away from the kinks")


def _check_gap(inst: dict) -> CheckResult:
    phi, batch = _phi(inst), _batch(inst)
    smallest = float(np.min(np.abs(pre_activations(phi, batch.samples))))
    start = int(math.log2(smooth_relu.monotone_onset(smallest)))
    gaps = [gradient_limit_gap(phi, batch, inst["xi"], 2**k) for k in range(start, 25)]
    passed = _nonincreasing(gaps) and gaps[-1] < GAP_FINAL_TOL
    return CheckResult(passed, f"gaps from 2^{start}: {gaps[0]!r} -> {gaps[-1]!r}", {"final_gap": gaps[-1]})


def _gen_realization_limit(rng: np.random.Generator) -> dict:
    for _ in range(1000):
        d, H = int(rng.integers(1, 4)), int(rng.integers(1, 9))
        phi = _floats(rng.uniform(-1.0, 1.0, size=d * H + 2 * H + 1))
        x = rng.uniform(-1.0, 1.0, size=d)
        pre = pre_activations(ParamVector.from_list(d, H, phi), x.reshape(1, d))
        if np.all(np.abs(pre) >= 1e-3):
            return {"d": d, "H": H, "phi": phi, "x": _floats(x)}
    raise RuntimeError("could not build a realization instance away from the kinks")


def _check_realization_limit(inst: dict) -> CheckResult:
    phi = _phi(inst)
    x = np.asarray(inst["x"])
    pre = pre_activations(phi, x.reshape(1, -1))[0]
    start = int(math.log2(smooth_relu.monotone_onset(float(np.min(np.abs(pre))))))
    rs = [2**k for k in range(start, 31)]
    # 各神經元的 |R_r(p) - max{p,0}| 單調；網路層級只要求最後的差距
    units_monotone = all(_nonincreasing([g for g, _ in smooth_relu.limit_profile(float(p), rs)], 1e-15) for p in pre)
    final = abs(realize_smoothed(phi, x, rs[-1]) - realize_exact(phi, x))
    passed = units_monotone and final < GAP_FINAL_TOL
    detail = f"unit gaps monotone from 2^{start}: {units_monotone}, final {final!r}"
    return CheckResult(passed, detail, {"final_gap": final})


def _gen_true_limit(rng: np.random.Generator) -> dict:
    H = int(rng.integers(1, 5))
    return {
        "d": 1,
        "H": H,
        "a": 0.0,
        "b": 1.0,
        "phi": _floats(rng.uniform(-1.0, 1.0, size=3 * H + 1)),
        "xi": float(rng.uniform(-1.0, 1.0)),
    }


def _check_true_limit(inst: dict) -> CheckResult:
    phi, dist = _phi(inst), _uniform(inst)
    closed = true_gradient(phi, dist, inst["xi"])
    coarse = float(np.linalg.norm(true_gradient_smoothed(phi, dist, inst["xi"], 2**12).values - closed.values))
    fine = float(np.linalg.norm(true_gradient_smoothed(phi, dist, inst["xi"], 2**24).values - closed.values))
    passed = fine <= coarse + BOUND_SLACK and fine <= 1e-3 * (1.0 + closed.norm())
    return CheckResult(passed, f"gap at 2^12 {coarse!r}, at 2^24 {fine!r}", {"coarse": coarse, "fine": fine})


PROPERTIES: List[Property] = [
    # identities
    Property(
        "pairing_identity", "identities", "<∇V, G^n> = 8 empirical risk", _network_instance, _check_pairing
    ),
    Property(
        "descent_identity", "identities", "exact one-step change of V under SGD", _gen_descent, _check_descent
    ),
    Property(
        "pairing_identity_true",
        "identities",
        "<∇V, G> = 8 true risk (d=1, exact integration)",
        _gen_true_1d,
        _check_pairing_true,
    ),
    Property(
        "descent_identity_true",
        "identities",
        "exact one-step change of V under GD",
        _gen_descent_true,
        _check_descent_true,
    ),
    Property(
        "pairing_identity_general",
        "identities",
        "pairing with a polynomial target, V anchored at f(0)",
        _gen_pairing_general,
        _check_pairing_general,
    ),
    Property(
        "lyapunov_gradient_fd", "identities", "∇V against central differences", _gen_sandwich, _check_lyapunov_fd
    ),
    Property(
        "point_mass_equivalence",
        "identities",
        "true gradient under a point mass = single-sample gradient",
        _gen_point_mass,
        _check_point_mass,
    ),
    # bounds
    Property("lyapunov_sandwich", "bounds", "‖φ‖² ≤ V ≤ 3‖φ‖² + 8ξ²", _gen_sandwich, _check_sandwich),
    Property(
        "empirical_gradient_norm",
        "bounds",
        "‖G^n‖² ≤ 4(a²(d+1)‖φ‖²+1)·risk",
        _network_instance,
        _check_empirical_grad_bound,
    ),
    Property(
        "true_gradient_norm", "bounds", "‖G‖² ≤ 4(a²(d+1)‖φ‖²+1)·true risk", _gen_true_1d, _check_true_grad_bound
    ),
    Property(
        "one_step_monotonicity", "bounds", "V does not increase for γ ≤ V-bound", _gen_one_step, _check_one_step
    ),
    Property("realization_lipschitz", "bounds", "sup |N^φ - N^ψ| ≤ L‖φ - ψ‖", _gen_lipschitz, _check_lipschitz),
    Property("step_bound_order", "bounds", "A-bound ≤ V-bound", _gen_true_1d, _check_bound_order),
    Property("zero_set", "bounds", "‖G‖ = 0 iff true risk = 0 (d=1)", _gen_zero_set, _check_zero_set),
    Property("derivative_range", "bounds", "0 < R_r' < 1", _gen_derivative, _check_derivative),
    Property(
        "unbiasedness",
        "bounds",
        "mean single-sample risk within 4 s.e. of the true risk",
        _gen_unbiased,
        _check_unbiased,
        max_trials=10,
    ),
    # limits
    Property("smooth_relu_fd", "limits", "R_r' against central differences", _gen_smooth_fd, _check_smooth_fd),
    Property(
        "smooth_relu_profile", "limits", "pointwise gaps nonincreasing from the onset", _gen_profile, _check_profile
    ),
    Property(
        "smoothed_gradient_fd",
        "limits",
        "∇L_r^n against central differences",
        _gen_smoothed_fd,
        _check_smoothed_fd,
    ),
    Property(
        "gradient_limit_gap", "limits", "‖∇L_r^n - G^n‖ nonincreasing, < 1e-6 at r=2^24", _gen_gap, _check_gap
    ),
    Property(
        "realization_limit",
        "limits",
        "unit gaps nonincreasing, |N_r - N_∞| < 1e-6 at r=2^30",
        _gen_realization_limit,
        _check_realization_limit,
    ),
    Property(
        "true_gradient_limit",
        "limits",
        "‖∇L_r - G‖ shrinks with r (d=1)",
        _gen_true_limit,
        _check_true_limit,
        max_trials=200,
    ),
]


def properties_for(suite: str) -> List[Property]:
    if suite == "all":
        return list(PROPERTIES)
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}, expected one of {SUITES + ('all',)}")
    return [p for p in PROPERTIES if p.suite == suite]


def property_by_name(name: str) -> Property:
    for prop in PROPERTIES:
        if prop.name == name:
            return prop
    raise KeyError(f"unknown property {name!r}")


def trial_generator(seed: int, property_index: int, trial: int) -> np.random.Generator:
    """Instance stream of (seed, property, trial); each trial can be regenerated alone."""
    return substream(seed, VERIFY_CHANNEL, (property_index << 40) | trial)


def _dump_falsifying(out_dir: Path, prop: Property, seed: int, trial: int, instance: dict, result: CheckResult) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"falsifying-{prop.name}-{trial}.json"
    payload = {
        "property": prop.name,
        "suite": prop.suite,
        "seed": seed,
        "trial": trial,
        "detail": result.detail,
        "values": result.values,
        "instance": instance,
    }
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def run_suite(
    suite: str,
    seed: int,
    trials: int,
    out_dir: Union[str, Path] = "verify-failures",
) -> SuiteReport:
    """
    執行指定的性質測試套件。

    Args:
        suite: identities | bounds | limits | all
        seed: 64-bit seed for instance generation
        trials: trials per property (capped by a property's max_trials)
        out_dir: where falsifying instances are written

    Returns:
        SuiteReport with per-property pass counts
    """
    if trials < 0:
        raise ValueError(f"trials must be nonnegative, got {trials}")
    report = SuiteReport(suite, seed, trials)
    out_path = Path(out_dir)
    for prop in properties_for(suite):
        index = PROPERTIES.index(prop)
        count = trials if prop.max_trials is None else min(trials, prop.max_trials)
        outcome = PropertyOutcome(prop.name, prop.suite, count, 0)
        for trial in range(count):
            instance = prop.generate(trial_generator(seed, index, trial))
            try:
                result = prop.check(instance)
            except (ArithmeticError, ValueError) as exc:
                result = CheckResult(False, f"{type(exc).__name__}: {exc}")
            if result.passed:
                outcome.passed += 1
                continue
            path = _dump_falsifying(out_path, prop, seed, trial, instance, result)
            outcome.falsifying.append(str(path))
            if not outcome.first_detail:
                outcome.first_detail = result.detail
            logger.warning(f"{prop.name} failed on trial {trial}: {result.detail} (saved {path})")
        logger.info(f"{prop.name}: {outcome.passed}/{outcome.trials}")
        report.outcomes.append(outcome)
    return report


def replay(path: Union[str, Path]) -> CheckResult:
    """Re-run the check of a falsifying-instance file."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    prop = property_by_name(payload["property"])
    result = prop.check(payload["instance"])
    logger.info(f"replayed {prop.name} from {path}: {'pass' if result.passed else 'FAIL'} ({result.detail})")
    return result
