"""Learning-rate schedules and the verdict returned by schedule validation."""

from dataclasses import dataclass, replace
from typing import Optional

SCHEDULE_KINDS = ("constant", "polynomial")


@dataclass(frozen=True)
class Schedule:
    """
    學習率 γₙ。

    constant:   γₙ = γ₀
    polynomial: γₙ = γ₀ / (n + 1)^p

    Either ``gamma0`` is given directly, or ``bound_fraction`` defers it until the
    initial parameters are known (γ₀ = bound_fraction × step bound, see ``resolved``).
    """

    kind: str
    horizon: int
    gamma0: Optional[float] = None
    power: float = 0.0
    bound_fraction: Optional[float] = None

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}, expected one of {SCHEDULE_KINDS}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be nonnegative, got {self.horizon}")
        if (self.gamma0 is None) == (self.bound_fraction is None):
            raise ValueError("give exactly one of gamma0 and bound_fraction")
        if self.gamma0 is not None and not self.gamma0 > 0.0:
            raise ValueError(f"gamma0 must be positive, got {self.gamma0}")
        if self.bound_fraction is not None and not self.bound_fraction > 0.0:
            raise ValueError(f"bound_fraction must be positive, got {self.bound_fraction}")
        if self.power < 0.0:
            raise ValueError(f"power must be nonnegative, got {self.power}")
        if self.kind == "constant" and self.power != 0.0:
            raise ValueError("a constant schedule takes no power")

    @classmethod
    def constant(cls, gamma0: float, horizon: int) -> "Schedule":
        return cls("constant", horizon, gamma0=gamma0)

    @classmethod
    def polynomial(cls, gamma0: float, power: float, horizon: int) -> "Schedule":
        return cls("polynomial", horizon, gamma0=gamma0, power=power)

    @property
    def is_resolved(self) -> bool:
        return self.gamma0 is not None

    def resolved(self, bound: float) -> "Schedule":
        """Fix γ₀ = bound_fraction × bound; already-resolved schedules are returned unchanged."""
        if self.is_resolved:
            return self
        return replace(self, gamma0=self.bound_fraction * bound, bound_fraction=None)

    def gamma(self, n: int) -> float:
        if self.gamma0 is None:
            raise ValueError("schedule has no gamma0 yet; call resolved(bound) first")
        if self.kind == "constant":
            return self.gamma0
        return self.gamma0 / (n + 1) ** self.power

    @property
    def sup_gamma(self) -> float:
        """sup_n γₙ; γ₀ for both kinds since p ≥ 0."""
        return self.gamma(0)

    @property
    def diverges(self) -> bool:
        """Σ γₙ = ∞."""
        return self.kind == "constant" or self.power <= 1.0


@dataclass(frozen=True)
class ScheduleVerdict:
    """Outcome of validate_schedule; rejection carries a reason instead of raising."""

    accepted: bool
    bound_form: str
    bound: Optional[float] = None
    threshold: Optional[float] = None
    schedule: Optional[Schedule] = None
    reason: str = ""

    @classmethod
    def accept(cls, bound_form: str, bound: float, threshold: float, schedule: Schedule) -> "ScheduleVerdict":
        return cls(True, bound_form, bound, threshold, schedule)

    @classmethod
    def reject(
        cls,
        bound_form: str,
        reason: str,
        bound: Optional[float] = None,
        threshold: Optional[float] = None,
        schedule: Optional[Schedule] = None,
    ) -> "ScheduleVerdict":
        return cls(False, bound_form, bound, threshold, schedule, reason)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "bound_form": self.bound_form,
            "bound": self.bound,
            "threshold": self.threshold,
            "gamma0": self.schedule.gamma0 if self.schedule is not None else None,
            "reason": self.reason,
        }
