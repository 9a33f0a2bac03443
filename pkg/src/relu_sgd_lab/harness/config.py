"""
JSON harness configuration.

The document is validated by a pydantic model tree with unknown keys rejected, then
converted into one ``RunConfig`` per seed. See docs/config_schema.md for the schema.
"""

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Annotated, Any, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from relu_sgd_lab.harness.converters import U64_MAX
from relu_sgd_lab.network.net_core import NetworkShape, StructuralError
from relu_sgd_lab.sampling.input_model import DiscreteFinite, InputDistribution, UniformBox
from relu_sgd_lab.training.optimizer import ExplicitInit, InitSpec, RunConfig, UniformBoxInit
from relu_sgd_lab.training.schedules import Schedule

logger = logging.getLogger(__name__)

THREADS_ENV = "RELU_SGD_LAB_THREADS"

Seed = Annotated[int, Field(ge=0, le=U64_MAX)]


class ConfigError(ValueError):
    """The harness configuration is unreadable, fails the schema, or is inconsistent."""

    def __init__(self, message: str, problems: Optional[List[str]] = None):
        self.problems = problems or []
        if self.problems:
            message = message + "\n" + "\n".join(f"  - {p}" for p in self.problems)
        super().__init__(message)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ShapeModel(_Strict):
    d: int = Field(ge=1)
    H: int = Field(ge=1)


class ExplicitInitModel(_Strict):
    kind: Literal["explicit"]
    values: List[float]


class UniformInitModel(_Strict):
    kind: Literal["uniform_box"]
    low: float = -1.0
    high: float = 1.0
    seed: Optional[Seed] = None

    @model_validator(mode="after")
    def _ordered(self) -> "UniformInitModel":
        if not self.high > self.low:
            raise ValueError("init box needs low < high")
        return self


class UniformDistributionModel(_Strict):
    kind: Literal["uniform"]
    a: float
    b: float


class DiscreteDistributionModel(_Strict):
    kind: Literal["discrete"]
    a: float
    b: float
    points: List[List[float]]
    weights: List[float]


class ScheduleModel(_Strict):
    kind: Literal["constant", "polynomial"]
    horizon: int = Field(ge=0)
    gamma0: Optional[float] = Field(default=None, gt=0.0)
    bound_fraction: Optional[float] = Field(default=None, gt=0.0)
    power: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _one_step_source(self) -> "ScheduleModel":
        if (self.gamma0 is None) == (self.bound_fraction is None):
            raise ValueError("give exactly one of gamma0 and bound_fraction")
        if self.kind == "constant" and self.power != 0.0:
            raise ValueError("a constant schedule takes no power")
        return self


class ValidationModel(_Strict):
    bound_form: Literal["V", "A", "intro"] = "V"
    delta: float = Field(default=0.9, gt=0.0, lt=1.0)
    override: bool = False


class MonitoringModel(_Strict):
    true_risk_every: int = Field(default=0, ge=0)
    resolution: Optional[int] = Field(default=None, ge=2)
    stop_threshold: Optional[float] = Field(default=None, gt=0.0)
    descent_residual: bool = True


class OutputModel(_Strict):
    dir: str = "runs"


class HarnessConfig(_Strict):
    """Top-level harness document."""

    shape: ShapeModel
    init: Annotated[Union[ExplicitInitModel, UniformInitModel], Field(discriminator="kind")]
    distribution: Annotated[
        Union[UniformDistributionModel, DiscreteDistributionModel], Field(discriminator="kind")
    ]
    xi: float
    schedule: ScheduleModel
    batch_size: Union[Annotated[int, Field(ge=1)], List[Annotated[int, Field(ge=1)]]] = 1
    mode: Literal["gd", "sgd"] = "sgd"
    seeds: List[Seed] = Field(default_factory=lambda: [0], min_length=1)
    validation: ValidationModel = ValidationModel()
    monitoring: MonitoringModel = MonitoringModel()
    output: OutputModel = OutputModel()

    def build_distribution(self) -> InputDistribution:
        dist = self.distribution
        if isinstance(dist, UniformDistributionModel):
            return UniformBox(dist.a, dist.b, self.shape.d)
        return DiscreteFinite(dist.a, dist.b, dist.points, dist.weights)

    def build_init(self) -> InitSpec:
        if isinstance(self.init, ExplicitInitModel):
            return ExplicitInit(tuple(self.init.values))
        return UniformBoxInit(self.init.low, self.init.high, self.init.seed)

    def build_schedule(self) -> Schedule:
        s = self.schedule
        return Schedule(s.kind, s.horizon, gamma0=s.gamma0, power=s.power, bound_fraction=s.bound_fraction)

    def to_run_config(self, seed: int) -> RunConfig:
        """
        轉成單一 seed 的 RunConfig。

        Raises:
            ConfigError: the document passes the schema but its parts do not fit together
        """
        batch = self.batch_size if isinstance(self.batch_size, int) else tuple(self.batch_size)
        try:
            return RunConfig(
                shape=NetworkShape(self.shape.d, self.shape.H),
                init=self.build_init(),
                distribution=self.build_distribution(),
                xi=self.xi,
                schedule=self.build_schedule(),
                batch_size=batch,
                seed=seed,
                mode=self.mode,
                true_risk_every=self.monitoring.true_risk_every,
                resolution=self.monitoring.resolution,
                stop_threshold=self.monitoring.stop_threshold,
                bound_form=self.validation.bound_form,
                delta=self.validation.delta,
                override=self.validation.override,
                descent_residual=self.monitoring.descent_residual,
            )
        except (StructuralError, ValueError) as exc:
            raise ConfigError("inconsistent configuration", [str(exc)]) from exc


def _format_errors(exc: ValidationError) -> List[str]:
    problems = []
    for err in exc.errors():
        location = ".".join(str(part) for part in err.get("loc", ())) or "<root>"
        problems.append(f"{location}: {err.get('msg', 'invalid value')}")
    return problems


def parse_config(document: Union[str, bytes, dict]) -> HarnessConfig:
    """
    Validate a config given as JSON text or an already-decoded dict.

    Raises:
        ConfigError: JSON syntax error, schema violation, or inconsistent parts
    """
    try:
        if isinstance(document, dict):
            config = HarnessConfig.model_validate(document)
        else:
            config = HarnessConfig.model_validate(json.loads(document))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    except ValidationError as exc:
        raise ConfigError("config failed schema validation", _format_errors(exc)) from exc
    # 提早檢查結構一致性 (例如 explicit init 長度)
    config.to_run_config(config.seeds[0])
    return config


def load_config(path: Union[str, Path]) -> HarnessConfig:
    """讀取並驗證 JSON 設定檔。"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    config = parse_config(text)
    logger.debug(f"loaded config {path} ({config.mode}, seeds={config.seeds})")
    return config


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(config: HarnessConfig) -> str:
    """sha256 of the canonical JSON form of the validated config."""
    payload = config.model_dump(mode="json")
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def worker_limit(requested: Optional[int] = None) -> int:
    """Worker fan-out: min(requested, $RELU_SGD_LAB_THREADS), defaulting to the CPU count."""
    limit = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            limit = max(1, int(raw))
        except ValueError:
            logger.warning(f"ignoring {THREADS_ENV}={raw!r}: not an integer")
    if requested is not None:
        limit = min(limit, max(1, requested))
    return limit
