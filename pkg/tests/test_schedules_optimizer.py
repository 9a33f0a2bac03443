"""Tests for schedules, schedule validation, and the GD/SGD drivers."""

import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from relu_sgd_lab.harness.config import load_config
from relu_sgd_lab.network.net_core import NetworkShape, StructuralError
from relu_sgd_lab.risk.lyapunov import step_bound_A, step_bound_V
from relu_sgd_lab.risk.risk_engine import exact_fit
from relu_sgd_lab.sampling.input_model import DiscreteFinite, UniformBox
from relu_sgd_lab.training import (
    ExplicitInit,
    RunConfig,
    Schedule,
    ScheduleRejectedError,
    UniformBoxInit,
    gd_step,
    resolve_initial_params,
    run,
    run_many,
    sgd_step,
    validate_schedule,
)
from tests.fixtures.listing_data import (
    ACTIVE_DEMO_PHI,
    HALF_KINK_GRADIENT,
    HALF_KINK_PHI,
    LISTING_GRADIENT,
    LISTING_PHI,
    LISTING_XI,
)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def listing_config(schedule: Schedule, **kwargs) -> RunConfig:
    """The listing parameters as Θ₀ on uniform[0, 1] with ξ = 3."""
    return RunConfig(
        NetworkShape(1, 3), ExplicitInit(tuple(LISTING_PHI)), UniformBox(0.0, 1.0, 1), LISTING_XI, schedule, **kwargs
    )


def demo_config(mode: str, horizon: int, **kwargs) -> RunConfig:
    """d=1, H=8, ξ=1 on uniform[0, 1] with Θ₀ in [-0.5, 0.5]^dd and γ = 0.9 × V-bound."""
    return RunConfig(
        NetworkShape(1, 8),
        UniformBoxInit(-0.5, 0.5),
        UniformBox(0.0, 1.0, 1),
        1.0,
        Schedule("constant", horizon, bound_fraction=0.9),
        mode=mode,
        **kwargs,
    )


class TestSchedule:
    """Tests for Schedule."""

    @pytest.mark.parametrize(
        "n,expected",
        [
            (0, 0.5),
            (1, 0.25),
            (3, 0.125),
        ],
    )
    def test_polynomial_gamma(self, n, expected):
        """γₙ = γ₀ / (n + 1)^p with p = 1."""
        assert Schedule.polynomial(0.5, 1.0, 10).gamma(n) == expected

    def test_constant_gamma(self):
        """A constant schedule ignores n."""
        schedule = Schedule.constant(0.01, 5)
        assert [schedule.gamma(n) for n in range(3)] == [0.01, 0.01, 0.01]
        assert schedule.sup_gamma == 0.01

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": "cosine", "horizon": 1, "gamma0": 0.1},
            {"kind": "constant", "horizon": -1, "gamma0": 0.1},
            {"kind": "constant", "horizon": 1},
            {"kind": "constant", "horizon": 1, "gamma0": 0.1, "bound_fraction": 0.5},
            {"kind": "constant", "horizon": 1, "gamma0": 0.0},
            {"kind": "constant", "horizon": 1, "gamma0": 0.1, "power": 1.0},
            {"kind": "polynomial", "horizon": 1, "gamma0": 0.1, "power": -1.0},
        ],
    )
    def test_invalid(self, kwargs):
        """Malformed schedules are rejected at construction."""
        with pytest.raises(ValueError):
            Schedule(**kwargs)

    @pytest.mark.parametrize("power,diverges", [(0.0, True), (0.5, True), (1.0, True), (1.5, False), (2.0, False)])
    def test_diverges(self, power, diverges):
        """Σγₙ = ∞ exactly for p ≤ 1."""
        assert Schedule.polynomial(0.1, power, 10).diverges is diverges

    def test_unresolved_gamma(self):
        """A bound_fraction schedule has no γ₀ until resolved."""
        schedule = Schedule("constant", 10, bound_fraction=0.5)
        with pytest.raises(ValueError):
            schedule.gamma(0)
        assert schedule.resolved(0.2).gamma(0) == pytest.approx(0.1)


class TestValidateSchedule:
    """Tests for validate_schedule."""

    def test_listing_constant_accepted(self):
        """Constant(0.01) is below 0.9/77 for the listing Θ₀."""
        verdict = validate_schedule(listing_config(Schedule.constant(0.01, 10)))
        assert verdict.accepted
        assert verdict.bound == pytest.approx(1.0 / 77.0)

    def test_too_large_rejected(self):
        """Constant(0.012) exceeds δ/77 = 0.01168..."""
        verdict = validate_schedule(listing_config(Schedule.constant(0.012, 10)))
        assert not verdict.accepted
        assert "exceeds" in verdict.reason

    def test_summable_rejected(self):
        """p = 2 breaks Σγₙ = ∞ whatever γ₀ is."""
        verdict = validate_schedule(listing_config(Schedule.polynomial(0.001, 2.0, 100)))
        assert not verdict.accepted
        assert verdict.reason == "divergence hypothesis violated"

    def test_harmonic_accepted(self):
        """p = 1 with a small γ₀ is admissible."""
        assert validate_schedule(listing_config(Schedule.polynomial(0.001, 1.0, 100))).accepted

    def test_bound_fraction(self):
        """bound_fraction = δ resolves to exactly the V-form threshold."""
        cfg = listing_config(Schedule("constant", 10, bound_fraction=0.9))
        verdict = validate_schedule(cfg)
        assert verdict.accepted
        assert verdict.schedule.gamma0 == verdict.threshold

    def test_a_form(self):
        """The A-form threshold is the bound itself and far smaller."""
        cfg = listing_config(Schedule.constant(0.01, 10), bound_form="A")
        verdict = validate_schedule(cfg)
        phi0 = resolve_initial_params(cfg)
        assert not verdict.accepted
        assert verdict.threshold == step_bound_A(phi0, 1.0, LISTING_XI, 1)

    def test_verdict_dict(self):
        """to_dict carries the resolved γ₀."""
        payload = validate_schedule(listing_config(Schedule.constant(0.01, 10))).to_dict()
        assert payload["accepted"] is True
        assert payload["gamma0"] == 0.01
        assert payload["bound_form"] == "V"


class TestRunConfig:
    """Tests for RunConfig validation."""

    def test_dimension_mismatch(self):
        """The distribution must live in R^d."""
        with pytest.raises(StructuralError):
            RunConfig(NetworkShape(2, 3), UniformBoxInit(), UniformBox(0.0, 1.0, 1), 1.0, Schedule.constant(0.1, 1))

    def test_explicit_init_length(self):
        """An explicit Θ₀ must have dd entries."""
        with pytest.raises(StructuralError):
            RunConfig(
                NetworkShape(1, 3), ExplicitInit((0.0,) * 9), UniformBox(0.0, 1.0, 1), 1.0, Schedule.constant(0.1, 1)
            )

    @pytest.mark.parametrize("batch_size", [0, (4, 0), ()])
    def test_batch_sizes(self, batch_size):
        """Batch sizes are positive integers."""
        with pytest.raises(StructuralError):
            listing_config(Schedule.constant(0.01, 1), batch_size=batch_size)

    def test_batch_size_schedule(self):
        """A list of batch sizes repeats its last entry."""
        cfg = listing_config(Schedule.constant(0.01, 1), batch_size=(1, 2, 8))
        assert [cfg.batch_size_at(n) for n in range(5)] == [1, 2, 8, 8, 8]

    @pytest.mark.parametrize("delta", [0.0, 1.0, 1.5])
    def test_delta_range(self, delta):
        """δ lies in (0, 1)."""
        with pytest.raises(ValueError):
            listing_config(Schedule.constant(0.01, 1), delta=delta)

    def test_seeded_box_init(self):
        """A seeded box init is reproducible and depends on the seed."""
        first = resolve_initial_params(demo_config("gd", 1, seed=3))
        again = resolve_initial_params(demo_config("gd", 1, seed=3))
        other = resolve_initial_params(demo_config("gd", 1, seed=4))
        assert np.array_equal(first.values, again.values)
        assert not np.array_equal(first.values, other.values)
        assert np.all(np.abs(first.values) <= 0.5)


class TestRun:
    """Tests for run() on short horizons."""

    def test_gd_monitors(self):
        """A validated GD run keeps V nonincreasing and ‖Θₙ‖ ≤ √V(Θ₀)."""
        record = run(listing_config(Schedule.constant(0.01, 50), mode="gd"))
        V = record.column("V")
        assert record.steps_executed == 50
        assert all(later <= earlier + 1e-9 * max(1.0, earlier) for earlier, later in zip(V, V[1:]))
        assert record.final_V <= V[-1] + 1e-9
        assert record.max_norm <= math.sqrt(record.V0) + 1e-9
        assert record.v_monotone and record.norm_cap_held
        assert not record.violations

    def test_gd_rows(self):
        """GD rows carry the true risk and no empirical risk."""
        record = run(listing_config(Schedule.constant(0.01, 5), mode="gd"))
        assert record.column("emp_risk") == [None] * 5
        assert all(risk is not None for risk in record.column("true_risk"))
        assert all(abs(res) <= 1e-9 * (1.0 + row.V) for res, row in zip(record.column("descent_residual"), record.rows))

    def test_gd_risk_decreases(self):
        """The true risk after 200 GD steps is below the initial one."""
        record = run(demo_config("gd", 200))
        assert record.final_true_risk < record.rows[0].true_risk
        assert record.integration == {"method": "gauss-legendre-3", "exact": True, "resolution": None}

    def test_sgd_reproducible(self):
        """The same seed gives the same trajectory."""
        cfg = demo_config("sgd", 100, batch_size=4, seed=7)
        first, second = run(cfg), run(cfg)
        assert np.array_equal(first.final_params.values, second.final_params.values)
        assert first.column("emp_risk") == second.column("emp_risk")

    def test_sgd_true_risk_every(self):
        """The true risk is evaluated on every k-th step only."""
        record = run(demo_config("sgd", 10, true_risk_every=4))
        evaluated = [row.step for row in record.rows if row.true_risk is not None]
        assert evaluated == [0, 4, 8]
        assert all(row.emp_risk is not None for row in record.rows)

    def test_energy_budget(self):
        """Σ γₙ·riskₙ stays under V(Θ₀)/η."""
        record = run(demo_config("sgd", 200, batch_size=8))
        assert record.energy_limit is not None
        assert record.energy_sum <= record.energy_limit

    def test_rejected_raises(self):
        """A rejected schedule without override refuses to run."""
        with pytest.raises(ScheduleRejectedError) as excinfo:
            run(listing_config(Schedule.polynomial(0.001, 2.0, 10), mode="gd"))
        assert excinfo.value.verdict.reason == "divergence hypothesis violated"

    def test_override_runs(self):
        """override runs a rejected schedule with advisory monitors."""
        record = run(listing_config(Schedule.polynomial(0.001, 2.0, 10), mode="gd", override=True))
        assert not record.verdict.accepted
        assert record.steps_executed == 10

    def test_stop_threshold(self):
        """An exact fit stops after its first step."""
        shape = NetworkShape(1, 3)
        init = ExplicitInit(tuple(exact_fit(shape, 1.0).values.tolist()))
        cfg = RunConfig(
            shape, init, UniformBox(0.0, 1.0, 1), 1.0, Schedule.constant(0.01, 100), mode="gd", stop_threshold=1e-12
        )
        record = run(cfg)
        assert record.stopped_early
        assert record.steps_executed == 1
        assert record.final_true_risk == 0.0

    def test_zero_horizon(self):
        """horizon = 0 returns Θ₀ untouched."""
        record = run(listing_config(Schedule.constant(0.01, 0), mode="gd"))
        assert record.steps_executed == 0
        assert np.array_equal(record.final_params.values, np.asarray(LISTING_PHI))

    def test_explicit_gamma(self):
        """sgd_step accepts a step size in place of the schedule."""
        cfg = listing_config(Schedule.constant(0.01, 1))
        theta = resolve_initial_params(cfg)
        _, row = sgd_step(theta, 0, cfg, gamma=0.0)
        assert row.gamma == 0.0
        with pytest.raises(ValueError):
            sgd_step(theta, 0, cfg, gamma=-1.0)

    def test_run_many_seeds(self):
        """Each seed gets its own record."""
        records = run_many(demo_config("sgd", 5), [0, 1])
        assert [record.config.seed for record in records] == [0, 1]
        assert not np.array_equal(records[0].initial_params.values, records[1].initial_params.values)

    def test_step_bound_matches_schedule(self):
        """The resolved γ₀ is 0.9 × step_bound_V(Θ₀)."""
        cfg = demo_config("gd", 1)
        record = run(cfg)
        phi0 = record.initial_params
        assert record.config.schedule.gamma0 == pytest.approx(0.9 * step_bound_V(phi0, 1.0, 1, 1.0))


class TestSteps:
    """Single-step worked examples."""

    def test_sgd_step_listing(self):
        """Point mass at 2, ξ = 3, γ = 0.001: θ' = θ - 0.001·(0, 0, 64, 0, 0, 32, 0, 0, 64, 16)."""
        dist = DiscreteFinite.point_mass([2.0], 0.0, 3.0)
        cfg = RunConfig(
            NetworkShape(1, 3), ExplicitInit(tuple(LISTING_PHI)), dist, LISTING_XI, Schedule.constant(0.001, 1)
        )
        theta_next, row = sgd_step(resolve_initial_params(cfg), 0, cfg)
        expected = np.asarray(LISTING_PHI) - 0.001 * np.asarray(LISTING_GRADIENT)
        assert np.array_equal(theta_next.values, expected)
        assert row.emp_risk == 64.0
        assert row.V == 38.0

    def test_gd_step_half_kink(self):
        """N(x) = max{x - 1/2, 0} on [0, 1], ξ = 0, γ = 0.1: θ' = θ - 0.1·(5/24, 1/4, 1/12, 1/4)."""
        init = ExplicitInit(tuple(HALF_KINK_PHI))
        cfg = RunConfig(NetworkShape(1, 1), init, UniformBox(0.0, 1.0, 1), 0.0, Schedule.constant(0.1, 1))
        theta_next, row = gd_step(resolve_initial_params(cfg), 0, cfg)
        expected = np.asarray(HALF_KINK_PHI) - 0.1 * np.asarray(HALF_KINK_GRADIENT)
        assert theta_next.values.tolist() == pytest.approx(expected.tolist(), abs=1e-12)
        assert row.true_risk == pytest.approx(1.0 / 24.0, abs=1e-12)
        assert row.emp_risk is None


@pytest.mark.slow
class TestConvergence:
    """Finite-horizon convergence runs."""

    def test_gd(self):
        """With every unit active on [0, 1] at Θ₀, 10⁴ GD steps reach true risk below 1e-8."""
        record = run(replace(demo_config("gd", 10_000), init=ExplicitInit(tuple(ACTIVE_DEMO_PHI))))
        assert all(-0.5 <= value <= 0.5 for value in ACTIVE_DEMO_PHI)
        assert record.final_true_risk < 1e-8
        assert record.v_monotone
        assert record.max_norm <= math.sqrt(record.V0) + 1e-9

    def test_gd_random_init(self):
        """A random Θ₀ leaves a kink inside (0, 1) and converges polynomially; the monitors still hold."""
        record = run(demo_config("gd", 10_000))
        assert record.final_true_risk < 1e-6
        assert record.v_monotone
        assert record.max_norm <= math.sqrt(record.V0) + 1e-9

    def test_gd_demo_config(self):
        """configs/gd_demo.json ends below 1e-8."""
        config = load_config(CONFIG_DIR / "gd_demo.json")
        record = run(config.to_run_config(config.seeds[0]))
        assert record.final_true_risk < 1e-8

    @pytest.mark.parametrize("seed", range(5))
    def test_sgd(self, seed):
        """10⁵ SGD steps with M = 16 reach true risk below 1e-4."""
        record = run(replace(demo_config("sgd", 100_000, batch_size=16), seed=seed, descent_residual=False))
        assert record.final_true_risk < 1e-4
        assert record.v_monotone
