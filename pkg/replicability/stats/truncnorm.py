"""
Univariate normal laws truncated to an IntervalSet.

Masses are accumulated in log space. Far tails use the scaled complementary
error function so that truncations many standard deviations away from the
mean keep full relative accuracy; central pieces use plain normal CDF
differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfcx, log_ndtr, ndtr, ndtri

from replicability.domain.intervals import IntervalSet
from replicability.errors import DegenerateSupportError, InvalidArgumentError

MIN_SUPPORT_MASS = 1e-300
LOG_MIN_SUPPORT_MASS = math.log(MIN_SUPPORT_MASS)
TAIL_SWITCH_SD = 6.0
QUANTILE_PROB_TOL = 1e-10
QUANTILE_BRACKET_SD = 40.0
# Below this interval mass the vectorized sampler falls back to scalar inversion.
VECTOR_SAMPLER_MIN_MASS = 1e-280

_SQRT2 = math.sqrt(2.0)
_LN2 = math.log(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _log_sf(a: float) -> float:
    """log P(Z > a) for a standard normal Z."""
    if a == math.inf:
        return -math.inf
    if a == -math.inf:
        return 0.0
    if a > TAIL_SWITCH_SD:
        return math.log(0.5 * float(erfcx(a / _SQRT2))) - 0.5 * a * a
    return float(log_ndtr(-a))


def _log_cdf(b: float) -> float:
    return _log_sf(-b)


def _log1mexp(d: float) -> float:
    """log(1 - exp(d)) for d <= 0."""
    if d >= 0.0:
        return -math.inf
    if d == -math.inf:
        return 0.0
    if d > -_LN2:
        return math.log(-math.expm1(d))
    return math.log1p(-math.exp(d))


def _log_standard_mass(a: float, b: float) -> float:
    """log P(a < Z < b) for a standard normal Z."""
    if not a < b:
        return -math.inf
    if a >= 0.0:
        log_a = _log_sf(a)
        if log_a == -math.inf:
            return -math.inf
        return log_a + _log1mexp(_log_sf(b) - log_a)
    if b <= 0.0:
        log_b = _log_cdf(b)
        if log_b == -math.inf:
            return -math.inf
        return log_b + _log1mexp(_log_cdf(a) - log_b)
    return math.log1p(-(float(ndtr(a)) + float(ndtr(-b))))


def _log_sum(values: list[float]) -> float:
    finite = [value for value in values if value != -math.inf]
    if not finite:
        return -math.inf
    return float(np.logaddexp.reduce(finite))


def _check_sigma(sigma: float) -> None:
    if not sigma > 0 or math.isinf(sigma):
        raise InvalidArgumentError(f"sigma must be positive and finite, got {sigma}.")


def log_mass(s: IntervalSet, mu: float, sigma: float) -> float:
    """Return log P(X in s) for X ~ N(mu, sigma^2)."""
    _check_sigma(sigma)
    return _log_sum([_log_standard_mass((lo - mu) / sigma, (hi - mu) / sigma) for lo, hi in s.intervals])


def mass(s: IntervalSet, mu: float, sigma: float) -> float:
    """Return P(X in s) for X ~ N(mu, sigma^2)."""
    return math.exp(log_mass(s, mu, sigma))


def split_log_masses(x: float, mu: float, sigma: float, support: IntervalSet) -> tuple[float, float]:
    """Return the log masses of support below x and above x."""
    _check_sigma(sigma)
    z = (x - mu) / sigma
    lower: list[float] = []
    upper: list[float] = []
    for lo, hi in support.intervals:
        a, b = (lo - mu) / sigma, (hi - mu) / sigma
        if b <= z:
            lower.append(_log_standard_mass(a, b))
        elif a >= z:
            upper.append(_log_standard_mass(a, b))
        else:
            lower.append(_log_standard_mass(a, z))
            upper.append(_log_standard_mass(z, b))
    return _log_sum(lower), _log_sum(upper)


def tail_probabilities(x: float, mu: float, sigma: float, support: IntervalSet) -> tuple[float, float]:
    """
    Return (P(X <= x), P(X > x)) for X ~ N(mu, sigma^2) conditioned on support.

    Both tails are computed from their own log masses, so the smaller one keeps
    full relative precision. Only an exactly empty support is rejected here.
    """
    log_lower, log_upper = split_log_masses(x, mu, sigma, support)
    log_total = _log_sum([log_lower, log_upper])
    if log_total == -math.inf:
        raise DegenerateSupportError(f"Support {support} has zero mass under N({mu}, {sigma}^2).")
    return math.exp(log_lower - log_total), math.exp(log_upper - log_total)


@dataclass(frozen=True)
class TruncatedNormal:
    """N(mu, sigma^2) conditioned on an IntervalSet with positive mass."""

    mu: float
    sigma: float
    support: IntervalSet
    log_support_mass: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_sigma(self.sigma)
        if math.isnan(self.mu) or math.isinf(self.mu):
            raise InvalidArgumentError(f"mu must be finite, got {self.mu}.")
        value = log_mass(self.support, self.mu, self.sigma)
        if value < LOG_MIN_SUPPORT_MASS:
            raise DegenerateSupportError(
                f"Support {self.support} has mass below {MIN_SUPPORT_MASS:g} under "
                f"N({self.mu}, {self.sigma}^2)."
            )
        object.__setattr__(self, "log_support_mass", value)

    @property
    def support_mass(self) -> float:
        return math.exp(self.log_support_mass)


def trunc_cdf(x: float, d: TruncatedNormal) -> float:
    """P(X <= x | X in support); exactly 0 below and 1 above the support."""
    if x <= d.support.lower_bound:
        return 0.0
    if x >= d.support.upper_bound:
        return 1.0
    return tail_probabilities(x, d.mu, d.sigma, d.support)[0]


def trunc_sf(x: float, d: TruncatedNormal) -> float:
    """P(X > x | X in support), computed without the 1 - cdf cancellation."""
    if x <= d.support.lower_bound:
        return 1.0
    if x >= d.support.upper_bound:
        return 0.0
    return tail_probabilities(x, d.mu, d.sigma, d.support)[1]


def trunc_pdf(x: float, d: TruncatedNormal) -> float:
    if not d.support.contains(x):
        return 0.0
    z = (x - d.mu) / d.sigma
    return math.exp(-0.5 * z * z - _LOG_SQRT_2PI - math.log(d.sigma) - d.log_support_mass)


def _quantile_bracket(d: TruncatedNormal) -> tuple[float, float]:
    finite_points = [d.mu]
    for lo, hi in d.support.intervals:
        finite_points.extend(value for value in (lo, hi) if math.isfinite(value))
    lower = d.support.lower_bound
    upper = d.support.upper_bound
    if math.isinf(lower):
        lower = min(finite_points) - QUANTILE_BRACKET_SD * d.sigma
    if math.isinf(upper):
        upper = max(finite_points) + QUANTILE_BRACKET_SD * d.sigma
    return lower, upper


def trunc_quantile(p: float, d: TruncatedNormal) -> float:
    """
    Return x with trunc_cdf(x, d) = p.

    Bracketed root finding between the support ends (or mu +/- 40 sigma when
    a support end is infinite), followed by one Newton step. The result is
    snapped onto the closure of the support, so gap regions where the CDF is
    flat resolve to the gap's left endpoint.
    """
    if not 0.0 < p < 1.0:
        raise InvalidArgumentError(f"Quantile level must lie in (0, 1), got {p}.")
    lower, upper = _quantile_bracket(d)

    def excess(x: float) -> float:
        return trunc_cdf(x, d) - p

    x = brentq(excess, lower, upper, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    residual = excess(x)
    if abs(residual) > 0.0:
        density = trunc_pdf(x, d)
        if density > 0.0:
            candidate = x - residual / density
            if lower <= candidate <= upper and abs(excess(candidate)) < abs(residual):
                x = candidate
    return d.support.snap(x)


def trunc_sample(d: TruncatedNormal, rng: np.random.Generator) -> float:
    """Draw one variate by inverting the CDF at a uniform from rng."""
    u = rng.random()
    while u == 0.0:
        u = rng.random()
    return trunc_quantile(u, d)


def trunc_sample_many(d: TruncatedNormal, rng: np.random.Generator, size: int) -> np.ndarray:
    """
    Draw size variates by inverse CDF, one uniform per draw.

    The uniform first selects the support interval through the cumulative
    interval masses and is then rescaled inside that interval.
    """
    if size < 0:
        raise InvalidArgumentError("size must be nonnegative.")
    u = rng.random(size)
    u[u == 0.0] = np.nextafter(0.0, 1.0)

    log_pieces = np.array(
        [_log_standard_mass((lo - d.mu) / d.sigma, (hi - d.mu) / d.sigma) for lo, hi in d.support.intervals]
    )
    probs = np.exp(log_pieces - d.log_support_mass)
    cumulative = np.concatenate(([0.0], np.cumsum(probs)))
    cumulative[-1] = 1.0
    piece_index = np.clip(np.searchsorted(cumulative, u, side="right") - 1, 0, len(probs) - 1)

    draws = np.empty(size, dtype=float)
    for index, (lo, hi) in enumerate(d.support.intervals):
        chosen = piece_index == index
        if not np.any(chosen):
            continue
        local_u = np.clip((u[chosen] - cumulative[index]) / probs[index], 0.0, 1.0)
        a, b = (lo - d.mu) / d.sigma, (hi - d.mu) / d.sigma
        if math.exp(log_pieces[index]) < VECTOR_SAMPLER_MIN_MASS:
            piece = TruncatedNormal(d.mu, d.sigma, IntervalSet(((lo, hi),)))
            values = np.array([trunc_quantile(float(min(max(v, 1e-16), 1 - 1e-16)), piece) for v in local_u])
            draws[chosen] = values
            continue
        if a >= 0.0:
            sf_a, sf_b = float(ndtr(-a)), float(ndtr(-b))
            standard = -ndtri(sf_a - local_u * (sf_a - sf_b))
        else:
            cdf_a, cdf_b = float(ndtr(a)), float(ndtr(b))
            standard = ndtri(cdf_a + local_u * (cdf_b - cdf_a))
        draws[chosen] = np.clip(d.mu + d.sigma * standard, lo, hi)
    return draws
