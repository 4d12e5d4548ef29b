"""
Directional false-discovery-proportion estimates and upper confidence bounds.

Adjusted p-values p' = p / alpha0 are superuniform under a directional null
given selection, so the count B of "large" p-values (p' >= lambda) bounds the
null count from below in distribution. The internal method compares B with
Binomial(V, 1 - lambda); the external method exploits the gap between a
stricter threshold alpha and lambda * alpha0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from replicability.domain.results import FdpMethod, FdpResult
from replicability.errors import InvalidArgumentError, UndefinedEstimateError
from replicability.stats.binomial import largest_accepted_size

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA = 0.5
DEFAULT_CONFIDENCE = 0.95


@dataclass(frozen=True)
class FdpEstimate:
    """Point estimate and the counts it was computed from."""

    r: int
    b: int
    estimate: float
    n: int | None = None
    r_alpha: int | None = None
    beta: float | None = None


def _check_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise InvalidArgumentError(f"{name} must lie in (0, 1), got {value}.")


def _check_pvalues(pvalues: Sequence[float]) -> None:
    if len(pvalues) == 0:
        raise InvalidArgumentError("At least one p-value is required.")
    for value in pvalues:
        if not 0.0 < value <= 1.0:
            raise InvalidArgumentError(f"p-values must lie in (0, 1], got {value}.")


def count_large(pvalues: Sequence[float], lambda_: float) -> int:
    """Number of p-values at or above lambda; ties count as large."""
    return sum(1 for value in pvalues if value >= lambda_)


def storey_estimate(p_adjusted: Sequence[float], lambda_: float = DEFAULT_LAMBDA) -> FdpEstimate:
    """Return min(1, B / ((1 - lambda) R))."""
    _check_unit("lambda", lambda_)
    _check_pvalues(p_adjusted)
    r = len(p_adjusted)
    b = count_large(p_adjusted, lambda_)
    return FdpEstimate(r=r, b=b, estimate=min(1.0, b / ((1.0 - lambda_) * r)))


def ucb_internal(
    b: int, r: int, lambda_: float = DEFAULT_LAMBDA, confidence: float = DEFAULT_CONFIDENCE
) -> tuple[int, float]:
    """Return (V*, V*/R) with V* the largest null count the binomial test still accepts."""
    _check_unit("lambda", lambda_)
    _check_unit("confidence", confidence)
    if not 0 <= b <= r or r == 0:
        raise InvalidArgumentError(f"ucb_internal requires 0 <= B <= R and R > 0, got B={b}, R={r}.")
    v_star = largest_accepted_size(b, 0, r, 1.0 - lambda_, confidence)
    return v_star, v_star / r


def external_beta(alpha: float, alpha0: float, lambda_: float) -> float:
    alpha_prime = alpha / alpha0
    return (1.0 - lambda_) / (1.0 - lambda_ + alpha_prime)


def external_estimate(
    p_adjusted: Sequence[float], alpha: float, alpha0: float = 0.05, lambda_: float = DEFAULT_LAMBDA
) -> FdpEstimate:
    """Estimate the directional FDP among studies that would pass a stricter threshold alpha."""
    _check_unit("lambda", lambda_)
    _check_unit("alpha0", alpha0)
    if not 0.0 < alpha < lambda_ * alpha0:
        raise InvalidArgumentError(
            f"The external method needs 0 < alpha < lambda * alpha0 = {lambda_ * alpha0:g}, got {alpha}."
        )
    _check_pvalues(p_adjusted)
    alpha_prime = alpha / alpha0
    r_alpha = sum(1 for value in p_adjusted if value < alpha_prime)
    b = count_large(p_adjusted, lambda_)
    if r_alpha == 0:
        raise UndefinedEstimateError(f"No adjusted p-value falls below alpha/alpha0 = {alpha_prime:g}.")
    beta = external_beta(alpha, alpha0, lambda_)
    estimate = min(1.0, (1.0 - beta) / beta * b / r_alpha)
    return FdpEstimate(r=len(p_adjusted), b=b, estimate=estimate, n=r_alpha + b, r_alpha=r_alpha, beta=beta)


def ucb_external(
    b: int, r_alpha: int, beta: float, confidence: float = DEFAULT_CONFIDENCE, scan_limit: int | None = None
) -> tuple[int, float]:
    """
    Return (Q, min(1, (Q - B) / R_alpha)).

    Q is the largest q >= B with P(Binomial(q, beta) <= B) >= 1 - confidence.
    The ascending scan stops at B + R_alpha + N unless a limit is given.
    """
    _check_unit("beta", beta)
    _check_unit("confidence", confidence)
    if b < 0 or r_alpha < 0:
        raise InvalidArgumentError("Counts must be nonnegative.")
    if r_alpha == 0:
        raise UndefinedEstimateError("The external upper bound needs at least one discovery at alpha.")
    limit = scan_limit if scan_limit is not None else b + r_alpha + (r_alpha + b)
    q = largest_accepted_size(b, b, max(limit, b), beta, confidence)
    if q == limit:
        logger.warning("External bound scan reached its limit q=%d; the bound is capped.", limit)
    return q, min(1.0, (q - b) / r_alpha)


def internal_fdp(
    p_adjusted: Sequence[float],
    *,
    alpha0: float = 0.05,
    alpha: float | None = None,
    lambda_: float = DEFAULT_LAMBDA,
    confidence: float = DEFAULT_CONFIDENCE,
) -> FdpResult:
    """Storey-style estimate plus the partial-conjunction upper bound."""
    estimate = storey_estimate(p_adjusted, lambda_)
    v_star, fraction = ucb_internal(estimate.b, estimate.r, lambda_, confidence)
    return FdpResult(
        method=FdpMethod.INTERNAL,
        alpha0=alpha0,
        alpha=alpha0 if alpha is None else alpha,
        lambda_=lambda_,
        confidence=confidence,
        r=estimate.r,
        b=estimate.b,
        estimate=estimate.estimate,
        ucb=max(fraction, estimate.estimate),
        bound_count=v_star,
    )


def external_fdp(
    p_adjusted: Sequence[float],
    *,
    alpha: float,
    alpha0: float = 0.05,
    lambda_: float = DEFAULT_LAMBDA,
    confidence: float = DEFAULT_CONFIDENCE,
) -> FdpResult:
    estimate = external_estimate(p_adjusted, alpha, alpha0, lambda_)
    q, fraction = ucb_external(estimate.b, estimate.r_alpha, estimate.beta, confidence)
    return FdpResult(
        method=FdpMethod.EXTERNAL,
        alpha0=alpha0,
        alpha=alpha,
        lambda_=lambda_,
        confidence=confidence,
        r=estimate.r,
        b=estimate.b,
        estimate=estimate.estimate,
        ucb=max(fraction, estimate.estimate),
        bound_count=q - estimate.b,
        n=estimate.n,
        r_alpha=estimate.r_alpha,
        beta=estimate.beta,
        q=q,
    )


def replication_fdp(
    p_replication: Sequence[float],
    lambda_: float = DEFAULT_LAMBDA,
    confidence: float = DEFAULT_CONFIDENCE,
    *,
    alpha0: float = 0.05,
    alpha: float | None = None,
) -> FdpResult:
    """
    Same machinery as the internal method on one-sided replication p-values.

    Replications are not selected, so no alpha0 adjustment applies.
    """
    estimate = storey_estimate(p_replication, lambda_)
    v_star, fraction = ucb_internal(estimate.b, estimate.r, lambda_, confidence)
    return FdpResult(
        method=FdpMethod.REPLICATION,
        alpha0=alpha0,
        alpha=alpha0 if alpha is None else alpha,
        lambda_=lambda_,
        confidence=confidence,
        r=estimate.r,
        b=estimate.b,
        estimate=estimate.estimate,
        ucb=max(fraction, estimate.estimate),
        bound_count=v_star,
        source="replication",
    )
