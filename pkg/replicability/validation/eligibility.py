"""Eligibility filtering of parsed study pairs and the report that explains it."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable

from replicability.domain.study import StudyCandidate, StudyPair, TestFamily
from replicability.errors import NotZApproximableError
from replicability.standardization import (
    DEFAULT_MIN_DF,
    implied_pvalue,
    pvalue_consistent,
    selection_event,
    to_zscore,
)

logger = logging.getLogger(__name__)

STATUS_ELIGIBLE = "eligible"
STATUS_MALFORMED = "malformed"
STATUS_NOT_UNIVARIATE = "not_univariate"
STATUS_NOT_SIGNIFICANT = "not_significant"
STATUS_MISSING_DIRECTION = "missing_direction"
STATUS_MISSING_REPLICATION_DIRECTION = "missing_replication_direction"
STATUS_INSUFFICIENT_DF = "insufficient_df"
STATUS_NOT_Z_APPROXIMABLE = "not_z_approximable"
STATUS_OUTSIDE_SELECTION = "outside_selection"

# Significant univariate studies that cannot enter the selective analyses.
FDP_ONLY_STATUSES = frozenset(
    {
        STATUS_INSUFFICIENT_DF,
        STATUS_MISSING_REPLICATION_DIRECTION,
        STATUS_NOT_Z_APPROXIMABLE,
        STATUS_OUTSIDE_SELECTION,
    }
)


@dataclass(frozen=True)
class EligibilityIssue:
    severity: str
    message: str
    line: int | None = None
    column: str | None = None
    study_id: str | None = None

    def format(self) -> str:
        prefix = "ERROR" if self.severity == "error" else "WARNING"
        location = []
        if self.line is not None:
            location.append(f"line {self.line}")
        if self.column:
            location.append(f"column {self.column}")
        if self.study_id:
            location.append(f"study {self.study_id}")
        where = f" ({', '.join(location)})" if location else ""
        return f"[{prefix}] {self.message}{where}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "severity": self.severity,
            "message": self.message,
            "line": self.line,
            "column": self.column,
            "study_id": self.study_id,
        }


@dataclass
class EligibilityReport:
    """
    Row issues plus one status code per study.

    Statuses are mutually exclusive. ``significant_univariate`` counts the
    FDP analysis class; ``z_approximable`` counts the selective analysis class.
    """

    issues: list[EligibilityIssue] = field(default_factory=list)
    statuses: dict[str, str] = field(default_factory=dict)

    @property
    def errors(self) -> list[EligibilityIssue]:
        return [issue for issue in self.issues if issue.severity == "error"]

    @property
    def warnings(self) -> list[EligibilityIssue]:
        return [issue for issue in self.issues if issue.severity == "warning"]

    @property
    def has_errors(self) -> bool:
        return bool(self.errors)

    @property
    def total(self) -> int:
        return len(self.statuses)

    @property
    def malformed(self) -> int:
        return self.count(STATUS_MALFORMED)

    @property
    def z_approximable(self) -> int:
        return self.count(STATUS_ELIGIBLE)

    @property
    def significant_univariate(self) -> int:
        return self.z_approximable + sum(self.count(status) for status in FDP_ONLY_STATUSES)

    def count(self, status: str) -> int:
        return sum(1 for value in self.statuses.values() if value == status)

    def add_error(self, message: str, *, line: int | None = None, column: str | None = None,
                  study_id: str | None = None) -> None:
        self.issues.append(EligibilityIssue("error", message, line, column, study_id))

    def add_warning(self, message: str, *, line: int | None = None, column: str | None = None,
                    study_id: str | None = None) -> None:
        self.issues.append(EligibilityIssue("warning", message, line, column, study_id))

    def set_status(self, study_id: str, status: str) -> None:
        self.statuses[study_id] = status

    def extend(self, other: "EligibilityReport") -> None:
        self.issues.extend(other.issues)
        self.statuses.update(other.statuses)

    def to_dict(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "malformed": self.malformed,
            "significant_univariate": self.significant_univariate,
            "z_approximable": self.z_approximable,
            "by_status": dict(sorted(Counter(self.statuses.values()).items())),
            "statuses": dict(self.statuses),
            "error_count": len(self.errors),
            "warning_count": len(self.warnings),
            "issues": [issue.to_dict() for issue in self.issues],
        }


@dataclass(frozen=True)
class EligibilityCriteria:
    alpha0: float = 0.05
    min_df: int = DEFAULT_MIN_DF
    consistency_tolerance: float = 0.10


@dataclass
class EligibleStudies:
    """The two nested analysis classes: FDP candidates and standardized pairs."""

    significant: list[StudyCandidate]
    pairs: list[StudyPair]
    report: EligibilityReport


def filter_eligible(
    candidates: Iterable[StudyCandidate],
    criteria: EligibilityCriteria | None = None,
    report: EligibilityReport | None = None,
) -> EligibleStudies:
    """
    Split parsed candidates into the FDP class and the selective-inference class.

    A study enters the FDP class when both arms are univariate, the effect
    direction of the original is known and its p-value is strictly below alpha0.
    A replication F1 row without a direction stays in this class; only the
    replication-source FDP drops it. The study additionally enters the
    selective class when both arms standardize to z-scores and z_O lies
    inside the selection event.
    """
    criteria = criteria or EligibilityCriteria()
    merged = EligibilityReport()
    if report is not None:
        merged.extend(report)

    significant: list[StudyCandidate] = []
    pairs: list[StudyPair] = []
    for candidate in candidates:
        status = _fdp_status(candidate, criteria)
        if status is not None:
            merged.set_status(candidate.study_id, status)
            continue
        significant.append(candidate)

        pair, status = _standardize(candidate, criteria, merged)
        merged.set_status(candidate.study_id, status)
        if pair is not None:
            pairs.append(pair)

    logger.info(
        "Eligibility: %d studies, %d significant univariate, %d z-approximable",
        merged.total,
        merged.significant_univariate,
        merged.z_approximable,
    )
    return EligibleStudies(significant=significant, pairs=pairs, report=merged)


def _fdp_status(candidate: StudyCandidate, criteria: EligibilityCriteria) -> str | None:
    original, replication = candidate.original, candidate.replication
    if not (original.test_family.is_univariate and replication.test_family.is_univariate):
        return STATUS_NOT_UNIVARIATE
    if not original.reported_p < criteria.alpha0:
        return STATUS_NOT_SIGNIFICANT
    if original.effect_sign is None:
        return STATUS_MISSING_DIRECTION
    return None


def _standardize(
    candidate: StudyCandidate,
    criteria: EligibilityCriteria,
    report: EligibilityReport,
) -> tuple[StudyPair | None, str]:
    original, replication = candidate.original, candidate.replication
    for arm in (original, replication):
        if arm.test_family.uses_df and (arm.df is None or arm.df < criteria.min_df):
            return None, STATUS_INSUFFICIENT_DF
    if replication.test_family is TestFamily.F1 and replication.direction is None:
        return None, STATUS_MISSING_REPLICATION_DIRECTION

    try:
        z_o, k_o = to_zscore(original, criteria.min_df)
        z_r, k_r = to_zscore(replication, criteria.min_df)
    except NotZApproximableError as exc:
        report.add_warning(str(exc), line=candidate.line, study_id=candidate.study_id)
        return None, STATUS_NOT_Z_APPROXIMABLE

    selection = selection_event(original, criteria.alpha0)
    if not selection.contains(z_o):
        report.add_warning(
            f"Standardized original score {z_o:.4g} lies outside the selection event {selection}",
            line=candidate.line,
            study_id=candidate.study_id,
        )
        return None, STATUS_OUTSIDE_SELECTION

    if not pvalue_consistent(z_o, original, criteria.consistency_tolerance):
        report.add_warning(
            f"Implied p-value {implied_pvalue(z_o, original.sidedness):.4g} differs from the reported "
            f"{original.reported_p:.4g} by more than {criteria.consistency_tolerance:.0%}",
            line=candidate.line,
            column="reported_p",
            study_id=candidate.study_id,
        )

    pair = StudyPair(
        study_id=candidate.study_id,
        original=original,
        replication=replication,
        z_o=z_o,
        z_r=z_r,
        k_o=k_o,
        k_r=k_r,
        sign=1 if z_o > 0 else -1,
        selection=selection,
        alpha0=criteria.alpha0,
    )
    return pair, STATUS_ELIGIBLE
