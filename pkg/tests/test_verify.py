"""Tests for the randomized property suites."""

import json

import pytest

from relu_sgd_lab.harness import verify
from relu_sgd_lab.harness.verify import (
    PROPERTIES,
    SUITES,
    CheckResult,
    Property,
    properties_for,
    property_by_name,
    replay,
    run_suite,
    trial_generator,
)


def _always_fails(instance: dict) -> CheckResult:
    return CheckResult(False, f"value {instance['value']}", {"value": instance["value"]})


def _raises(instance: dict) -> CheckResult:
    raise ZeroDivisionError("boom")


def _gen_value(rng) -> dict:
    return {"value": float(rng.uniform())}


class TestRegistry:
    """Tests for the property registry."""

    def test_every_suite_populated(self):
        """Each suite has at least one property and 'all' is their union."""
        for suite in SUITES:
            assert properties_for(suite)
        assert len(properties_for("all")) == sum(len(properties_for(s)) for s in SUITES)

    def test_unique_names(self):
        """Property names are unique."""
        names = [p.name for p in PROPERTIES]
        assert len(names) == len(set(names))

    def test_unknown_suite(self):
        """Unknown suites are rejected."""
        with pytest.raises(ValueError):
            properties_for("speed")

    def test_unknown_property(self):
        """Unknown property names raise KeyError."""
        with pytest.raises(KeyError):
            property_by_name("no_such_property")

    def test_instances_reproducible(self):
        """(seed, property, trial) regenerates the same instance."""
        prop = property_by_name("pairing_identity")
        index = PROPERTIES.index(prop)
        first = prop.generate(trial_generator(123, index, 4))
        second = prop.generate(trial_generator(123, index, 4))
        assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)

    def test_instances_serializable(self):
        """Every generator returns a JSON-serializable instance."""
        for index, prop in enumerate(PROPERTIES):
            json.dumps(prop.generate(trial_generator(0, index, 0)))


class TestRunSuite:
    """Tests for run_suite on the real properties."""

    def test_zero_trials(self, tmp_path):
        """trials = 0 is a vacuous pass."""
        report = run_suite("all", 0, 0, tmp_path)
        assert report.ok
        assert all(o.trials == 0 for o in report.outcomes)

    def test_negative_trials(self, tmp_path):
        """Negative trial counts are rejected."""
        with pytest.raises(ValueError):
            run_suite("identities", 0, -1, tmp_path)

    @pytest.mark.parametrize("suite,trials", [("identities", 10), ("bounds", 5), ("limits", 3)])
    def test_suites_pass(self, tmp_path, suite, trials):
        """A few trials of each suite pass and write nothing."""
        report = run_suite(suite, 1, trials, tmp_path / suite)
        failed = [(o.name, o.first_detail) for o in report.outcomes if not o.ok]
        assert not failed
        assert not (tmp_path / suite).exists()

    def test_max_trials_cap(self, tmp_path):
        """A property's max_trials caps the requested count."""
        report = run_suite("bounds", 2, 12, tmp_path)
        outcome = next(o for o in report.outcomes if o.name == "unbiasedness")
        assert outcome.trials == 10

    def test_report_dict(self, tmp_path):
        """to_dict lists every property of the suite."""
        payload = run_suite("identities", 0, 1, tmp_path).to_dict()
        assert payload["suite"] == "identities"
        assert payload["passed"] is True
        assert [p["name"] for p in payload["properties"]] == [p.name for p in properties_for("identities")]


class TestFalsifying:
    """Tests for falsifying-instance files and replay."""

    @pytest.fixture
    def failing_registry(self, monkeypatch):
        props = [
            Property("always_fails", "identities", "never holds", _gen_value, _always_fails),
            Property("raises", "identities", "check blows up", _gen_value, _raises),
        ]
        monkeypatch.setattr(verify, "PROPERTIES", props)
        return props

    def test_failures_written(self, failing_registry, tmp_path):
        """Each failing trial is written to its own file."""
        report = run_suite("identities", 5, 3, tmp_path)
        assert not report.ok
        outcome = report.outcomes[0]
        assert outcome.passed == 0
        assert len(outcome.falsifying) == 3
        payload = json.loads((tmp_path / "falsifying-always_fails-0.json").read_text(encoding="utf-8"))
        assert payload["property"] == "always_fails"
        assert payload["seed"] == 5
        assert payload["trial"] == 0
        assert set(payload["instance"]) == {"value"}

    def test_exception_is_failure(self, failing_registry, tmp_path):
        """An arithmetic error inside a check counts as a failure."""
        outcome = run_suite("identities", 0, 1, tmp_path).outcomes[1]
        assert outcome.passed == 0
        assert outcome.first_detail == "ZeroDivisionError: boom"

    def test_replay(self, failing_registry, tmp_path):
        """A written instance replays to the same verdict."""
        run_suite("identities", 7, 1, tmp_path)
        path = tmp_path / "falsifying-always_fails-0.json"
        payload = json.loads(path.read_text(encoding="utf-8"))
        result = replay(path)
        assert not result.passed
        assert result.detail == payload["detail"]

    def test_replay_real_property(self, tmp_path):
        """A hand-written instance of a real property replays through its checker."""
        prop = property_by_name("pairing_identity")
        instance = prop.generate(trial_generator(0, PROPERTIES.index(prop), 0))
        path = tmp_path / "instance.json"
        path.write_text(json.dumps({"property": prop.name, "instance": instance}), encoding="utf-8")
        assert replay(path).passed
