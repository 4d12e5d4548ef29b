"""
Standardization of heterogeneous test statistics to unit-variance z-scores.

Every downstream method assumes Z ~ N(k * theta, 1). t and F(1, df) statistics
are treated as z-scores once their degrees of freedom reach the eligibility
threshold; correlations go through the Fisher transformation.
"""

from __future__ import annotations

import logging
import math

from scipy.special import ndtr, ndtri
from scipy.stats import t as student_t

from replicability.domain.intervals import IntervalSet
from replicability.domain.study import Sidedness, StudyArm, TestFamily
from replicability.errors import InvalidArgumentError, NotSelectedError, NotZApproximableError

logger = logging.getLogger(__name__)

DEFAULT_MIN_DF = 30


def k_factor(arm: StudyArm) -> float:
    """Return the design constant k linking the effect size to the z-score mean."""
    if arm.k_override is not None:
        return arm.k_override
    family = arm.test_family
    if family in (TestFamily.Z, TestFamily.T_ONE_SAMPLE):
        return math.sqrt(_require(arm.n_total, "n_total", family))
    if family is TestFamily.T_TWO_SAMPLE:
        return _two_group_k(_require(arm.n_group1, "n_group1", family), _require(arm.n_group2, "n_group2", family))
    if family is TestFamily.F1:
        if arm.n_group1 is not None and arm.n_group2 is not None:
            return _two_group_k(arm.n_group1, arm.n_group2)
        # Equal groups of n/2 each.
        return math.sqrt(_require(arm.n_total, "n_total", family)) / 2.0
    if family.is_correlation:
        effective = _require(arm.n_total, "n_total", family) - 3 - arm.n_covariates
        if effective <= 0:
            raise InvalidArgumentError(f"n_total - 3 - n_covariates must be positive, got {effective}.")
        return math.sqrt(effective)
    raise InvalidArgumentError(f"No k-factor is defined for test family {family.value!r}.")


def _require(value: int | None, name: str, family: TestFamily) -> int:
    if value is None:
        raise InvalidArgumentError(f"{family.value} arm is missing design field {name}.")
    if value <= 0:
        raise InvalidArgumentError(f"{name} must be positive, got {value}.")
    return value


def _two_group_k(n1: int, n2: int) -> float:
    return math.sqrt(n1 * n2 / (n1 + n2))


def to_zscore(arm: StudyArm, min_df: int = DEFAULT_MIN_DF) -> tuple[float, float]:
    """Return (z, k) for an arm, or raise NotZApproximableError."""
    family = arm.test_family
    if not family.is_univariate:
        raise NotZApproximableError(f"Test family {family.value!r} is not univariate.")
    if family.uses_df:
        if arm.df is None or arm.df < min_df:
            raise NotZApproximableError(f"{family.value} arm has df={arm.df}, below the threshold {min_df}.")
    if family.is_correlation and not -1.0 < arm.statistic < 1.0:
        raise InvalidArgumentError(f"Correlation must lie in (-1, 1), got {arm.statistic}.")

    try:
        k = k_factor(arm)
    except InvalidArgumentError as exc:
        raise NotZApproximableError(str(exc)) from exc

    if family is TestFamily.F1:
        if arm.statistic < 0:
            raise InvalidArgumentError(f"F statistic must be nonnegative, got {arm.statistic}.")
        if arm.direction is None:
            raise NotZApproximableError("F1 arm has no effect direction.")
        return arm.direction * math.sqrt(arm.statistic), k
    if family.is_correlation:
        if arm.n_total is None or arm.n_total - 3 - arm.n_covariates <= 0:
            raise NotZApproximableError("Correlation arm needs n_total - 3 - n_covariates > 0.")
        scale = math.sqrt(arm.n_total - 3 - arm.n_covariates)
        return scale * math.atanh(arm.signed_statistic), k
    return arm.signed_statistic, k


def adjust_pvalue(p: float, alpha0: float) -> float:
    """Divide a selected p-value by the selection threshold."""
    if not 0.0 < p:
        raise InvalidArgumentError(f"p-value must be positive, got {p}.")
    if not p < alpha0:
        raise NotSelectedError(f"p-value {p} is not below the selection threshold {alpha0}.")
    return p / alpha0


def critical_value(alpha0: float, sidedness: Sidedness) -> float:
    """Return z_{1-alpha0/2} for two-sided tests and z_{1-alpha0} for one-sided tests."""
    tail = alpha0 / 2.0 if sidedness is Sidedness.TWO_SIDED else alpha0
    return -float(ndtri(tail))


def selection_event(arm: StudyArm, alpha0: float) -> IntervalSet:
    """Return the set of original z-scores that pass the significance filter."""
    if not 0.0 < alpha0 <= 1.0:
        raise InvalidArgumentError(f"alpha0 must lie in (0, 1], got {alpha0}.")
    if alpha0 == 1.0:
        return IntervalSet.full()
    cutoff = critical_value(alpha0, arm.sidedness)
    if arm.sidedness is Sidedness.TWO_SIDED:
        return IntervalSet.two_sided(cutoff)
    if (arm.effect_sign or 1) > 0:
        return IntervalSet.above(cutoff)
    return IntervalSet.below(-cutoff)


def implied_pvalue(z: float, sidedness: Sidedness) -> float:
    """p-value implied by a z-score under the normal approximation."""
    one_tail = float(ndtr(-abs(z)))
    return 2.0 * one_tail if sidedness is Sidedness.TWO_SIDED else one_tail


def pvalue_consistent(z: float, arm: StudyArm, tolerance: float = 0.10) -> bool:
    """Check the implied p-value against the reported one within a relative tolerance."""
    implied = implied_pvalue(z, arm.sidedness)
    return abs(implied - arm.reported_p) <= tolerance * arm.reported_p


def replication_pvalue(arm: StudyArm, sign: int, min_df: int = DEFAULT_MIN_DF) -> float:
    """
    One-sided replication p-value in the original claimed direction.

    Uses the normal law of the standardized score when the arm is
    z-approximable and the exact reference law of the statistic otherwise.
    """
    if sign not in (-1, 1):
        raise InvalidArgumentError(f"sign must be -1 or +1, got {sign}.")
    try:
        z, _ = to_zscore(arm, min_df)
        return float(ndtr(-sign * z))
    except NotZApproximableError:
        logger.debug("Replication arm is not z-approximable; using its exact reference law.")

    family = arm.test_family
    if family in (TestFamily.T_ONE_SAMPLE, TestFamily.T_TWO_SAMPLE) and arm.df is not None:
        return float(student_t.sf(sign * arm.signed_statistic, arm.df))
    if family is TestFamily.F1 and arm.df is not None and arm.direction is not None:
        return float(student_t.sf(sign * arm.direction * math.sqrt(arm.statistic), arm.df))
    if family is TestFamily.Z:
        return float(ndtr(-sign * arm.signed_statistic))
    if family.is_correlation and arm.n_total is not None and arm.n_total - 3 - arm.n_covariates > 0:
        z = math.sqrt(arm.n_total - 3 - arm.n_covariates) * math.atanh(arm.signed_statistic)
        return float(ndtr(-sign * z))
    raise NotZApproximableError(f"No reference law is available for a {family.value} replication arm.")


def pointbiserial_true_corr(d: float, n_treat: int, n_ctrl: int) -> float:
    """Population point-biserial correlation implied by a standardized mean difference d."""
    if n_treat <= 0 or n_ctrl <= 0:
        raise InvalidArgumentError("Group sizes must be positive.")
    p = n_treat / (n_treat + n_ctrl)
    pq = p * (1.0 - p)
    return d * math.sqrt(pq) / math.sqrt(1.0 + d * d * pq)
