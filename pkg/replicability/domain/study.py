"""Study arms, parsed study candidates and standardized study pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from replicability.domain.intervals import IntervalSet
from replicability.errors import InvalidArgumentError


class TestFamily(str, Enum):
    """Reference law of a reported test statistic."""

    __test__ = False

    Z = "z"
    T_ONE_SAMPLE = "t_one_sample"
    T_TWO_SAMPLE = "t_two_sample"
    F1 = "F1"
    CORRELATION = "correlation"
    PARTIAL_CORRELATION = "partial_correlation"
    OTHER = "other"

    @property
    def is_univariate(self) -> bool:
        return self is not TestFamily.OTHER

    @property
    def uses_df(self) -> bool:
        return self in (TestFamily.T_ONE_SAMPLE, TestFamily.T_TWO_SAMPLE, TestFamily.F1)

    @property
    def is_correlation(self) -> bool:
        return self in (TestFamily.CORRELATION, TestFamily.PARTIAL_CORRELATION)


class Sidedness(str, Enum):
    ONE_SIDED = "one_sided"
    TWO_SIDED = "two_sided"


class ArmRole(str, Enum):
    ORIGINAL = "original"
    REPLICATION = "replication"


@dataclass(frozen=True)
class StudyArm:
    """One reported test: the original study or its replication."""

    test_family: TestFamily
    statistic: float
    reported_p: float
    sidedness: Sidedness = Sidedness.TWO_SIDED
    df: int | None = None
    n_total: int | None = None
    n_group1: int | None = None
    n_group2: int | None = None
    n_covariates: int = 0
    direction: int | None = None
    k_override: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.reported_p <= 1.0:
            raise InvalidArgumentError(f"reported_p must lie in (0, 1], got {self.reported_p}.")
        if self.direction not in (None, -1, 1):
            raise InvalidArgumentError(f"direction must be -1 or +1, got {self.direction}.")
        if self.k_override is not None and not self.k_override > 0:
            raise InvalidArgumentError(f"k_override must be positive, got {self.k_override}.")
        if self.n_covariates < 0:
            raise InvalidArgumentError("n_covariates must be nonnegative.")

    @property
    def signed_statistic(self) -> float:
        """The statistic oriented by the direction column when one is given."""
        if self.direction is None:
            return self.statistic
        return self.direction * abs(self.statistic)

    @property
    def effect_sign(self) -> int | None:
        """Direction of the reported effect, or None when it cannot be told."""
        if self.direction is not None:
            return self.direction
        if self.test_family is TestFamily.F1 or self.statistic == 0:
            return None
        return 1 if self.statistic > 0 else -1


@dataclass(frozen=True)
class StudyCandidate:
    """An original/replication pair as read from the study table."""

    study_id: str
    original: StudyArm
    replication: StudyArm
    line: int | None = None


@dataclass(frozen=True)
class StudyPair:
    """A study pair standardized to unit-variance z-scores Z ~ N(k*theta, 1)."""

    study_id: str
    original: StudyArm
    replication: StudyArm
    z_o: float
    z_r: float
    k_o: float
    k_r: float
    sign: int
    selection: IntervalSet
    alpha0: float

    def __post_init__(self) -> None:
        for name in ("k_o", "k_r"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidArgumentError(f"{name} must be finite and positive, got {value}.")
        if self.z_o == 0:
            raise InvalidArgumentError(f"Study {self.study_id}: z_O must be nonzero.")
        if self.sign != (1 if self.z_o > 0 else -1):
            raise InvalidArgumentError(f"Study {self.study_id}: sign must equal sgn(z_O).")
        if not self.selection.contains(self.z_o):
            raise InvalidArgumentError(
                f"Study {self.study_id}: z_O={self.z_o:.6g} lies outside the selection event {self.selection}."
            )

    @property
    def effect_o(self) -> float:
        return self.z_o / self.k_o

    @property
    def effect_r(self) -> float:
        return self.z_r / self.k_r
