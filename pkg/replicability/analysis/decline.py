"""Aggregate decline p-values into estimates and a confidence band over a rho grid."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from replicability.analysis.fdp import ucb_internal
from replicability.analysis.selective import decline_pvalue
from replicability.domain.results import DeclineBand, DeclineRow
from replicability.domain.study import StudyPair
from replicability.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

DEFAULT_RHO_GRID = "0:1:0.05"


def complement_pvalue(p: float) -> float:
    """p-value of the complementary one-sided hypothesis for a continuous test."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"p-value must lie in [0, 1], got {p}.")
    return 1.0 - p


def parse_grid(spec: str) -> list[float]:
    """
    Parse 'start:stop:step' (inclusive stop) or a comma-separated list.

    Grid values are rounded to 12 decimals so 0:1:0.05 yields exactly 0.05, 0.1, ...
    """
    text = spec.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidArgumentError(f"Grid must look like start:stop:step, got {spec!r}.")
        try:
            start, stop, step = (float(part) for part in parts)
        except ValueError as exc:
            raise InvalidArgumentError(f"Grid bounds must be numbers, got {spec!r}.") from exc
        if step <= 0 or stop < start:
            raise InvalidArgumentError(f"Grid needs start <= stop and a positive step, got {spec!r}.")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + index * step, 12) for index in range(count)]
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InvalidArgumentError(f"Grid values must be numbers, got {spec!r}.") from exc
    if not values:
        raise InvalidArgumentError("Grid must not be empty.")
    return values


def band_row(
    pvalues: Sequence[float],
    rho: float,
    lambda_: float,
    confidence: float,
    complements: Sequence[float] | None = None,
) -> DeclineRow:
    """Decline estimates at one rho from the per-study decline p-values."""
    m = len(pvalues)
    if complements is None:
        complements = [complement_pvalue(p) for p in pvalues]
    b = sum(1 for p in pvalues if p >= lambda_)
    b_complement = sum(1 for q in complements if q >= lambda_)
    v_star, _ = ucb_internal(b, m, lambda_, confidence)
    v_star_complement, _ = ucb_internal(b_complement, m, lambda_, confidence)
    return DeclineRow(
        rho=rho,
        under=max(0.0, 1.0 - b / ((1.0 - lambda_) * m)),
        over=min(1.0, b_complement / ((1.0 - lambda_) * m)),
        ci_lo=max(0.0, 1.0 - v_star / m),
        ci_hi=min(1.0, v_star_complement / m),
        b=b,
        b_complement=b_complement,
        v_star=v_star,
        v_star_complement=v_star_complement,
    )


def monotone_pvalues(raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Make a (studies x ascending rho) matrix of decline p-values monotone in rho.

    The hypotheses are nested: "declined by less than rho" at rho implies it at
    every larger rho, so the running maximum from the left is still a valid
    p-value. The complementary hypotheses nest the other way and take the
    running maximum of 1 - p from the right. Both only move p-values up.
    """
    forward = np.maximum.accumulate(raw, axis=1)
    backward = np.maximum.accumulate((1.0 - raw)[:, ::-1], axis=1)[:, ::-1]
    return forward, backward


def decline_band(
    pairs: Sequence[StudyPair],
    rho_grid: Sequence[float] | None = None,
    lambda_: float = 0.5,
    confidence: float = 0.95,
) -> DeclineBand:
    """
    Underestimate, overestimate and two-sided band for the fraction of effects
    that declined by at least rho, at every grid point.

    ``confidence`` is per side; 0.95 on each side gives a 90% band. Per-study
    p-values are made monotone over the sorted grid before counting, so
    ``under`` and ``over`` are nonincreasing in rho. Studies whose raw p-values
    needed that correction are listed in ``nonmonotone_ids``.
    """
    if not pairs:
        raise InvalidArgumentError("decline_band needs at least one study pair.")
    if not 0.0 < lambda_ < 1.0:
        raise InvalidArgumentError(f"lambda must lie in (0, 1), got {lambda_}.")
    grid = sorted(set(rho_grid if rho_grid is not None else parse_grid(DEFAULT_RHO_GRID)))
    raw = np.array([[decline_pvalue(pair, rho) for rho in grid] for pair in pairs])
    forward, backward = monotone_pvalues(raw)

    changed = np.any(forward > raw, axis=1) | np.any(backward > 1.0 - raw, axis=1)
    nonmonotone_ids = tuple(pair.study_id for pair, flag in zip(pairs, changed) if flag)
    if nonmonotone_ids:
        logger.warning(
            "Decline p-values are not monotone in rho for %d studies (%s); using running extremes over the grid.",
            len(nonmonotone_ids),
            ", ".join(nonmonotone_ids[:10]) + (", ..." if len(nonmonotone_ids) > 10 else ""),
        )

    rows = [
        band_row(forward[:, j].tolist(), rho, lambda_, confidence, complements=backward[:, j].tolist())
        for j, rho in enumerate(grid)
    ]
    logger.info("Decline band computed on %d grid points for %d studies", len(grid), len(pairs))
    return DeclineBand(
        rows=tuple(rows),
        m=len(pairs),
        lambda_=lambda_,
        confidence=confidence,
        nonmonotone_ids=nonmonotone_ids,
    )
