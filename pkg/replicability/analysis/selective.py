"""
Selective z-tests for linear contrasts of (theta_O, theta_R).

Only Z_O is truncated to the selection event. For a contrast eta with
eta1 > 0, D = eta'Z is independent of the orthogonal statistic
M = eta2 Z_O - eta1 Z_R, and given M the event Z_O in A becomes
D in (|eta|^2 A - eta2 M) / eta1. The null law of D is therefore a
one-dimensional truncated normal with mean delta and variance |eta|^2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from replicability.domain.intervals import IntervalSet, affine_map
from replicability.domain.results import IntervalEstimate, IntervalTarget
from replicability.domain.selective import Contrast, SelectiveProblem, Tail
from replicability.domain.study import StudyPair
from replicability.errors import DegenerateSupportError, InvalidArgumentError
from replicability.stats.truncnorm import log_mass, tail_probabilities

logger = logging.getLogger(__name__)

SATURATION_MASS = 1e-12
CI_BRACKET_NORMS = 50.0
ROOT_XTOL = 1e-9
MONOTONE_TOL = 1e-10
DEFAULT_MONOTONE_POINTS = 201
DEFAULT_SCAN_POINTS = 2000
PREDICTIVE_HALF_WIDTH_SD = 10.0

FLAG_SATURATED = "saturated_support"
FLAG_NONMONOTONE = "nonmonotone_pvalue"
FLAG_LOWER_UNBOUNDED = "lower_unbounded"
FLAG_UPPER_UNBOUNDED = "upper_unbounded"
FLAG_DISCONNECTED = "disconnected_acceptance"
FLAG_EMPTY_ACCEPTANCE = "empty_acceptance"
FLAG_INVERTED = "inverted_endpoints"


@dataclass(frozen=True)
class SelectiveTest:
    """Observed statistic, its conditional null law and the resulting p-value."""

    statistic: float
    null_mean: float
    null_sd: float
    support: IntervalSet
    cdf: float
    sf: float
    pvalue: float
    saturated: bool = False


def conditional_support(prob: SelectiveProblem, c: Contrast) -> tuple[float, IntervalSet]:
    """Return the observed D and the set D must lie in given M."""
    d = c.eta1 * prob.z_o + c.eta2 * prob.z_r
    m = c.eta2 * prob.z_o - c.eta1 * prob.z_r
    support = affine_map(prob.selection, c.norm_squared / c.eta1, -c.eta2 * m / c.eta1)
    return d, support


def selective_test(prob: SelectiveProblem, c: Contrast) -> SelectiveTest:
    d, support = conditional_support(prob, c)
    sd = math.sqrt(c.norm_squared)
    saturated = log_mass(support, c.delta, sd) < math.log(SATURATION_MASS)
    try:
        cdf, sf = tail_probabilities(d, c.delta, sd, support)
    except DegenerateSupportError as exc:
        raise DegenerateSupportError(
            f"Conditional support {support} has zero mass under delta={c.delta:g}."
        ) from exc

    if c.side is Tail.LOWER_TAIL:
        pvalue = cdf
    elif c.side is Tail.UPPER_TAIL:
        pvalue = sf
    else:
        pvalue = min(1.0, 2.0 * min(cdf, sf))
    return SelectiveTest(d, c.delta, sd, support, cdf, sf, pvalue, saturated)


def selective_pvalue(prob: SelectiveProblem, c: Contrast) -> float:
    """p-value of the selective z-test of eta' mu = delta."""
    return selective_test(prob, c).pvalue


def problem_from_pair(pair: StudyPair, adjusted: bool = True) -> SelectiveProblem:
    selection = pair.selection if adjusted else IntervalSet.full()
    return SelectiveProblem(pair.z_o, pair.z_r, pair.k_o, pair.k_r, selection, pair.sign)


def shift_contrast(k_o: float, k_r: float, delta: float = 0.0) -> Contrast:
    """eta = (1/k_O, -1/k_R), so eta' mu = theta_O - theta_R."""
    return Contrast(1.0 / k_o, -1.0 / k_r, delta, Tail.TWO_SIDED_EQUAL_TAIL)


def shift_test(pair: StudyPair, delta: float = 0.0, adjusted: bool = True) -> SelectiveTest:
    return selective_test(problem_from_pair(pair, adjusted), shift_contrast(pair.k_o, pair.k_r, delta))


def shift_pvalue(pair: StudyPair, delta: float = 0.0, adjusted: bool = True) -> float:
    """Two-sided equal-tail p-value for H: theta_O - theta_R = delta."""
    return shift_test(pair, delta, adjusted).pvalue


def _check_level(level: float) -> None:
    if not 0.0 < level < 1.0:
        raise InvalidArgumentError(f"level must lie in (0, 1), got {level}.")


def ci_shift(
    pair: StudyPair,
    level: float = 0.95,
    adjusted: bool = True,
    monotone_points: int = DEFAULT_MONOTONE_POINTS,
) -> IntervalEstimate:
    """
    Confidence interval for theta_O - theta_R by inverting the shift test.

    The conditional CDF of D at the observed value is nonincreasing in delta,
    so the lower endpoint solves sf = (1 - level)/2 and the upper endpoint
    solves cdf = (1 - level)/2. Endpoints that cannot be bracketed within
    D +/- 50 |eta| are reported as infinite.
    """
    _check_level(level)
    prob = problem_from_pair(pair, adjusted)
    contrast = shift_contrast(pair.k_o, pair.k_r)
    d, support = conditional_support(prob, contrast)
    sd = math.sqrt(contrast.norm_squared)
    tail = (1.0 - level) / 2.0
    bracket_lo, bracket_hi = d - CI_BRACKET_NORMS * sd, d + CI_BRACKET_NORMS * sd
    flags: list[str] = []

    def tails(delta: float) -> tuple[float, float]:
        try:
            return tail_probabilities(d, delta, sd, support)
        except DegenerateSupportError:
            return (1.0, 0.0) if delta < d else (0.0, 1.0)

    grid = np.linspace(bracket_lo, bracket_hi, monotone_points)
    cdf_grid = np.array([tails(delta)[0] for delta in grid])
    if np.any(np.diff(cdf_grid) > MONOTONE_TOL):
        flags.append(FLAG_NONMONOTONE)
        logger.warning("Study %s: conditional CDF is not monotone in delta on the bracket.", pair.study_id)

    def lower_excess(delta: float) -> float:
        return tails(delta)[1] - tail

    def upper_excess(delta: float) -> float:
        return tail - tails(delta)[0]

    if lower_excess(bracket_lo) >= 0.0:
        lo = -math.inf
        flags.append(FLAG_LOWER_UNBOUNDED)
    elif lower_excess(bracket_hi) <= 0.0:
        lo = bracket_hi
    else:
        lo = brentq(lower_excess, bracket_lo, bracket_hi, xtol=ROOT_XTOL)

    if upper_excess(bracket_hi) <= 0.0:
        hi = math.inf
        flags.append(FLAG_UPPER_UNBOUNDED)
    elif upper_excess(bracket_lo) >= 0.0:
        hi = bracket_lo
    else:
        hi = brentq(upper_excess, bracket_lo, bracket_hi, xtol=ROOT_XTOL)

    if lo > hi:
        flags.append(FLAG_INVERTED)
        logger.warning(
            "Study %s: shift interval endpoints came out reversed (%g > %g); reporting them swapped.",
            pair.study_id,
            lo,
            hi,
        )
        lo, hi = hi, lo
    return IntervalEstimate(lo, hi, level, IntervalTarget.THETA_SHIFT, adjusted, tuple(flags))


def predictive_interval(
    pair: StudyPair,
    level: float = 0.95,
    adjusted: bool = True,
    scan_points: int = DEFAULT_SCAN_POINTS,
) -> tuple[IntervalEstimate, IntervalEstimate]:
    """
    Predictive interval for the replication z-score and its effect-scale image.

    The acceptance region {z_R : shift test at delta = 0 accepts} is located by
    a dense scan centred where D = 0 and refined by root finding at each
    boundary. A disconnected region is reported as its hull with a flag.
    """
    _check_level(level)
    prob = problem_from_pair(pair, adjusted)
    contrast = shift_contrast(pair.k_o, pair.k_r)
    threshold = 1.0 - level
    ratio = pair.k_r / pair.k_o
    center = pair.z_o * ratio
    half_width = PREDICTIVE_HALF_WIDTH_SD * math.sqrt(1.0 + ratio * ratio)
    grid = np.linspace(center - half_width, center + half_width, scan_points)

    def excess(z_r: float) -> float:
        return selective_pvalue(prob.with_replication(float(z_r)), contrast) - threshold

    accepted = np.array([excess(z_r) >= 0.0 for z_r in grid])
    flags: list[str] = []
    if not accepted.any():
        flags.append(FLAG_EMPTY_ACCEPTANCE)
        logger.warning("Study %s: no replication score is accepted on the scan.", pair.study_id)
        z_interval = IntervalEstimate(center, center, level, IntervalTarget.Z_REPLICATION, adjusted, tuple(flags))
        return z_interval, z_interval.scaled(1.0 / pair.k_r, IntervalTarget.EFFECT_REPLICATION)

    inside = np.flatnonzero(accepted)
    first, last = int(inside[0]), int(inside[-1])
    if np.any(~accepted[first : last + 1]):
        flags.append(FLAG_DISCONNECTED)
        logger.warning("Study %s: predictive acceptance region is not connected; reporting its hull.", pair.study_id)

    if first == 0:
        lo = -math.inf
        flags.append(FLAG_LOWER_UNBOUNDED)
    else:
        lo = brentq(excess, grid[first - 1], grid[first], xtol=ROOT_XTOL)
    if last == scan_points - 1:
        hi = math.inf
        flags.append(FLAG_UPPER_UNBOUNDED)
    else:
        hi = brentq(excess, grid[last], grid[last + 1], xtol=ROOT_XTOL)

    z_interval = IntervalEstimate(lo, hi, level, IntervalTarget.Z_REPLICATION, adjusted, tuple(flags))
    return z_interval, z_interval.scaled(1.0 / pair.k_r, IntervalTarget.EFFECT_REPLICATION)


def oriented_problem(
    z_o: float, z_r: float, k_o: float, k_r: float, selection: IntervalSet
) -> SelectiveProblem:
    """Flip signs so the original effect is positive and restrict selection to (0, inf)."""
    s = 1 if z_o > 0 else -1
    oriented = affine_map(selection, float(s), 0.0).intersect(IntervalSet.above(0.0))
    return SelectiveProblem(s * z_o, s * z_r, k_o, k_r, oriented, 1)


def decline_contrast(k_o: float, k_r: float, rho: float) -> Contrast:
    """eta proportional to ((1 - rho)/k_O, -1/k_R); large D is evidence of decline."""
    return Contrast((1.0 - rho) / k_o, -1.0 / k_r, 0.0, Tail.UPPER_TAIL)


def decline_test(
    z_o: float, z_r: float, k_o: float, k_r: float, selection: IntervalSet, rho: float
) -> SelectiveTest:
    """
    One-sided test of H: theta_R >= (1 - rho) theta_O in the claimed direction.

    Small p-values are evidence that the replication effect kept less than a
    fraction 1 - rho of the original one. At rho = 1 the contrast no longer
    involves Z_O and the test reduces to the untruncated Phi(z_R).
    """
    if not 0.0 <= rho <= 1.0:
        raise InvalidArgumentError(f"rho must lie in [0, 1], got {rho}.")
    prob = oriented_problem(z_o, z_r, k_o, k_r, selection)
    if rho == 1.0:
        cdf = float(ndtr(prob.z_r))
        return SelectiveTest(-prob.z_r / k_r, 0.0, 1.0 / k_r, IntervalSet.full(), 1.0 - cdf, cdf, cdf)
    return selective_test(prob, decline_contrast(k_o, k_r, rho))


def decline_pvalue(pair: StudyPair, rho: float) -> float:
    """Decline p-value of a study pair; see decline_test."""
    return decline_test(pair.z_o, pair.z_r, pair.k_o, pair.k_r, pair.selection, rho).pvalue
