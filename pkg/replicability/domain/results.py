"""Result records produced by the analyses and serialized by the reporting layer."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any


def percent(value: float) -> int:
    """Integer percent for human-readable summaries, halves rounded up."""
    return int(math.floor(100.0 * value + 0.5))


class FdpMethod(str, Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"
    REPLICATION = "replication"


class IntervalTarget(str, Enum):
    THETA_SHIFT = "theta_shift"
    Z_REPLICATION = "z_replication"
    EFFECT_REPLICATION = "effect_replication"


class MultiplicityProcedure(str, Enum):
    BH = "bh"
    HOLM = "holm"


@dataclass(frozen=True)
class FdpResult:
    """
    Directional FDP estimate with its exact-binomial upper confidence bound.

    For the external method the estimate and bound are fractions of R_alpha;
    otherwise they are fractions of R. ``bound_count`` is V* (internal and
    replication) or Q - B (external). The lower bound is always 0.
    """

    method: FdpMethod
    alpha0: float
    alpha: float
    lambda_: float
    confidence: float
    r: int
    b: int
    estimate: float
    ucb: float
    bound_count: int
    n: int | None = None
    r_alpha: int | None = None
    beta: float | None = None
    q: int | None = None
    lcb: float = 0.0
    source: str = "original"

    @property
    def denominator(self) -> int:
        return self.r_alpha if self.method is FdpMethod.EXTERNAL and self.r_alpha is not None else self.r

    @property
    def estimate_count(self) -> float:
        """Numerator of the unclipped estimate over ``denominator``, e.g. 2.2 in 2.2/33."""
        if self.method is FdpMethod.EXTERNAL:
            return (1.0 - self.beta) / self.beta * self.b
        return self.b / (1.0 - self.lambda_)

    def summary(self) -> str:
        """Integer-percent display, e.g. '2.2 / 33 = 7%'."""
        estimate = f"{self.estimate_count:.3g} / {self.denominator} = {percent(self.estimate)}%"
        bound = f"{self.bound_count} / {self.denominator} = {percent(self.ucb)}%"
        return f"estimate {estimate}, upper bound {bound}"

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["method"] = self.method.value
        data["lambda"] = data.pop("lambda_")
        return data


@dataclass(frozen=True)
class IntervalEstimate:
    lo: float
    hi: float
    level: float
    target: IntervalTarget
    adjusted: bool
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"Interval endpoints out of order: {self.lo} > {self.hi}.")

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def scaled(self, factor: float, target: IntervalTarget) -> "IntervalEstimate":
        """Divide-by-k style rescaling for a positive factor."""
        return IntervalEstimate(self.lo * factor, self.hi * factor, self.level, target, self.adjusted, self.flags)


@dataclass(frozen=True)
class MultiplicityDecision:
    """Rejections of a BH or Holm procedure, in ascending p-value order."""

    procedure: MultiplicityProcedure
    level: float
    rejected_ids: tuple[str, ...]
    threshold_used: float
    m: int = 0

    @property
    def count(self) -> int:
        return len(self.rejected_ids)


@dataclass(frozen=True)
class ShiftResult:
    """Per-study effect-shift analysis: p-values plus interval estimates."""

    study_id: str
    z_o: float
    z_r: float
    k_o: float
    k_r: float
    pvalue_adjusted: float
    pvalue_unadjusted: float
    ci_shift: IntervalEstimate
    ci_shift_unadjusted: IntervalEstimate
    predictive_z: IntervalEstimate
    predictive_effect: IntervalEstimate
    flags: tuple[str, ...] = ()
    rejections: dict[str, bool] = field(default_factory=dict)

    def pvalue(self, adjusted: bool) -> float:
        return self.pvalue_adjusted if adjusted else self.pvalue_unadjusted


@dataclass(frozen=True)
class DeclineRow:
    rho: float
    under: float
    over: float
    ci_lo: float
    ci_hi: float
    b: int
    b_complement: int
    v_star: int
    v_star_complement: int


@dataclass(frozen=True)
class DeclineBand:
    """Decline estimates and confidence band over a grid of decline fractions."""

    rows: tuple[DeclineRow, ...]
    m: int
    lambda_: float
    confidence: float
    nonmonotone_ids: tuple[str, ...] = ()

    @property
    def rho_grid(self) -> list[float]:
        return [row.rho for row in self.rows]

    def row_at(self, rho: float, tol: float = 1e-9) -> DeclineRow:
        for row in self.rows:
            if abs(row.rho - rho) <= tol:
                return row
        raise KeyError(f"rho={rho} is not on the grid.")
