"""Tests for the JSON harness configuration."""

import json
from pathlib import Path

import pytest

from relu_sgd_lab.harness.config import (
    THREADS_ENV,
    ConfigError,
    config_hash,
    load_config,
    parse_config,
    worker_limit,
)
from relu_sgd_lab.harness.converters import U64_MAX
from relu_sgd_lab.sampling.input_model import DiscreteFinite, UniformBox
from relu_sgd_lab.training import ExplicitInit, UniformBoxInit
from tests.fixtures.listing_data import LISTING_PHI, demo_config

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


class TestParseConfig:
    """Tests for parse_config and load_config."""

    def test_demo_document(self):
        """The demo document becomes a GD RunConfig with a deferred γ₀."""
        cfg = parse_config(demo_config()).to_run_config(0)
        assert cfg.mode == "gd"
        assert cfg.shape.dd == 25
        assert isinstance(cfg.init, UniformBoxInit)
        assert isinstance(cfg.distribution, UniformBox)
        assert cfg.schedule.bound_fraction == 0.9
        assert cfg.schedule.gamma0 is None

    def test_json_text(self):
        """JSON text and the decoded dict give the same model."""
        assert parse_config(json.dumps(demo_config())) == parse_config(demo_config())

    @pytest.mark.parametrize("name", ["gd_demo.json", "sgd_demo.json", "rejected_power2.json"])
    def test_shipped_configs(self, name):
        """Every shipped config passes the schema."""
        config = load_config(CONFIG_DIR / name)
        assert config.seeds

    def test_unknown_top_level_key(self):
        """Unknown keys are rejected and named."""
        with pytest.raises(ConfigError) as excinfo:
            parse_config(demo_config(learning_rate=0.1))
        assert any("learning_rate" in problem for problem in excinfo.value.problems)

    def test_unknown_nested_key(self):
        """Unknown keys inside a section are rejected too."""
        document = demo_config(schedule={"kind": "constant", "gamma0": 0.01, "horizon": 5, "warmup": 3})
        with pytest.raises(ConfigError) as excinfo:
            parse_config(document)
        assert any(problem.startswith("schedule") for problem in excinfo.value.problems)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"shape": {"d": 0, "H": 3}},
            {"mode": "adam"},
            {"seeds": []},
            {"seeds": [-1]},
            {"seeds": [U64_MAX + 1]},
            {"batch_size": 0},
            {"schedule": {"kind": "constant", "horizon": 5}},
            {"schedule": {"kind": "constant", "gamma0": 0.01, "bound_fraction": 0.5, "horizon": 5}},
            {"validation": {"delta": 1.0}},
            {"init": {"kind": "uniform_box", "low": 1.0, "high": 0.0}},
            {"distribution": {"kind": "gaussian", "a": 0.0, "b": 1.0}},
        ],
    )
    def test_schema_violations(self, overrides):
        """Schema violations raise ConfigError."""
        with pytest.raises(ConfigError):
            parse_config(demo_config(**overrides))

    def test_explicit_init_length(self):
        """A structurally inconsistent document fails at parse time."""
        with pytest.raises(ConfigError, match="inconsistent"):
            parse_config(demo_config(init={"kind": "explicit", "values": [0.0] * 3}))

    def test_box_outside_discrete_support(self):
        """Discrete support points must lie in [a, b]^d."""
        discrete = {"kind": "discrete", "a": 0.0, "b": 1.0, "points": [[2.0]], "weights": [1.0]}
        document = demo_config(distribution=discrete)
        with pytest.raises(ConfigError):
            parse_config(document)

    def test_explicit_and_discrete(self):
        """Explicit Θ₀ and a discrete μ map onto their runtime types."""
        document = demo_config(
            shape={"d": 1, "H": 3},
            init={"kind": "explicit", "values": LISTING_PHI},
            distribution={"kind": "discrete", "a": 0.0, "b": 3.0, "points": [[2.0]], "weights": [1.0]},
            xi=3.0,
            batch_size=[1, 4],
        )
        cfg = parse_config(document).to_run_config(5)
        assert isinstance(cfg.init, ExplicitInit)
        assert isinstance(cfg.distribution, DiscreteFinite)
        assert cfg.batch_size == (1, 4)
        assert cfg.seed == 5

    def test_invalid_json(self):
        """Malformed JSON is a ConfigError."""
        with pytest.raises(ConfigError, match="not valid JSON"):
            parse_config("{not json")

    def test_missing_file(self, tmp_path):
        """An unreadable path is a ConfigError."""
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "missing.json")


class TestConfigHash:
    """Tests for config_hash."""

    def test_key_order_irrelevant(self):
        """Reordering keys gives the same digest."""
        document = demo_config()
        reordered = dict(reversed(list(document.items())))
        assert config_hash(parse_config(document)) == config_hash(parse_config(reordered))

    def test_defaults_are_hashed(self):
        """Spelling out a default does not change the digest."""
        explicit = demo_config(validation={"bound_form": "V", "delta": 0.9, "override": False})
        assert config_hash(parse_config(explicit)) == config_hash(parse_config(demo_config()))

    def test_changes_digest(self):
        """A different ξ gives a different digest."""
        assert config_hash(parse_config(demo_config())) != config_hash(parse_config(demo_config(xi=2.0)))

    def test_hex_digest(self):
        """sha256 hex digest."""
        digest = config_hash(parse_config(demo_config()))
        assert len(digest) == 64
        int(digest, 16)


class TestWorkerLimit:
    """Tests for worker_limit."""

    @pytest.mark.parametrize(
        "env,requested,expected",
        [
            ("3", None, 3),
            ("3", 8, 3),
            ("3", 2, 2),
            ("1", 5, 1),
            ("0", None, 1),
        ],
    )
    def test_cap(self, monkeypatch, env, requested, expected):
        """$RELU_SGD_LAB_THREADS caps the fan-out."""
        monkeypatch.setenv(THREADS_ENV, env)
        assert worker_limit(requested) == expected

    def test_not_an_integer(self, monkeypatch):
        """A malformed value falls back to the CPU count."""
        monkeypatch.setenv(THREADS_ENV, "many")
        assert worker_limit(1) == 1
        assert worker_limit() >= 1
