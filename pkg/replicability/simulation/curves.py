"""
Selection-bias curves for a single effect size theta shared by the original
and the replication.

The original estimate X_O ~ N(theta, sigma_O^2) is observed only when
|X_O / sigma_O| exceeds z_{1 - alpha0/2}; the replication estimate
X_R ~ N(theta, sigma_R^2) is not selected. Each curve is computed
analytically (closed form or one-dimensional quadrature over the truncated
original score) and can be cross-checked by Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr, ndtri

from replicability.config.scenarios import SimConfig
from replicability.domain.intervals import IntervalSet
from replicability.stats.truncnorm import TruncatedNormal, trunc_sample_many

QUAD_EPSABS = 1e-9
QUAD_LIMIT = 200
QUAD_SPAN_SD = 12.0

CurvePoints = list[tuple[float, float]]


def _cutoff(cfg: SimConfig) -> float:
    return -float(ndtri(cfg.alpha0 / 2.0))


def _selection_masses(mean: float, c: float) -> tuple[float, float]:
    """P(Z > c) and P(Z < -c) for Z ~ N(mean, 1)."""
    return float(ndtr(mean - c)), float(ndtr(-c - mean))


def curve_nonsig_same_dir(cfg: SimConfig) -> CurvePoints:
    """Expected fraction of replications that are not significant in the original direction."""
    c = _cutoff(cfg)
    points = []
    for theta in cfg.theta_grid:
        up_o, down_o = _selection_masses(theta / cfg.sigma_o, c)
        up_r, down_r = _selection_masses(theta / cfg.sigma_r, c)
        confirmed = (up_o * up_r + down_o * down_r) / (up_o + down_o)
        points.append((theta, 1.0 - confirmed))
    return points


def curve_type_s(cfg: SimConfig) -> CurvePoints:
    """Proportion of significant originals whose sign is wrong (theta >= 0 convention)."""
    c = _cutoff(cfg)
    points = []
    for theta in cfg.theta_grid:
        up, down = _selection_masses(theta / cfg.sigma_o, c)
        points.append((theta, down / (up + down)))
    return points


def _truncated_expectation(cfg: SimConfig, theta: float, integrand: Callable[[float], float]) -> float:
    """E[integrand(z) | |z| > c] for z ~ N(theta / sigma_O, 1)."""
    c = _cutoff(cfg)
    mean = theta / cfg.sigma_o
    up, down = _selection_masses(mean, c)

    def weighted(z: float) -> float:
        return math.exp(-0.5 * (z - mean) ** 2) / math.sqrt(2.0 * math.pi) * integrand(z)

    # Beyond 12 sd of the mean the remaining mass is below 1e-32.
    upper_end = max(c, mean) + QUAD_SPAN_SD
    lower_end = min(-c, mean) - QUAD_SPAN_SD
    upper_points = [mean] if c < mean < upper_end else None
    lower_points = [mean] if lower_end < mean < -c else None
    upper, _ = quad(weighted, c, upper_end, epsabs=QUAD_EPSABS, limit=QUAD_LIMIT, points=upper_points)
    lower, _ = quad(weighted, lower_end, -c, epsabs=QUAD_EPSABS, limit=QUAD_LIMIT, points=lower_points)
    return (upper + lower) / (up + down)


def curve_ci_miss(cfg: SimConfig) -> CurvePoints:
    """Expected fraction of original estimates outside the replication's confidence interval."""
    c = _cutoff(cfg)
    points = []
    for theta in cfg.theta_grid:

        def miss(z: float, theta: float = theta) -> float:
            gap = (cfg.sigma_o * z - theta) / cfg.sigma_r
            return float(ndtr(gap - c) + ndtr(-gap - c))

        points.append((theta, _truncated_expectation(cfg, theta, miss)))
    return points


def curve_decline(cfg: SimConfig) -> CurvePoints:
    """Expected fraction of replication estimates closer to zero in the claimed direction."""
    points = []
    for theta in cfg.theta_grid:

        def declined(z: float, theta: float = theta) -> float:
            below = float(ndtr((cfg.sigma_o * z - theta) / cfg.sigma_r))
            return below if z > 0 else 1.0 - below

        points.append((theta, _truncated_expectation(cfg, theta, declined)))
    return points


@dataclass(frozen=True)
class CurveEstimate:
    """Monte Carlo value of every curve at one theta, with standard errors."""

    theta: float
    trials: int
    nonsig_same_dir: float
    type_s: float
    ci_miss: float
    decline: float

    def standard_error(self, value: float) -> float:
        return math.sqrt(max(value * (1.0 - value), 0.0) / self.trials)


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def curves_monte_carlo(cfg: SimConfig, trials: int | None = None) -> list[CurveEstimate]:
    """Simulate selected originals by inverse CDF and fresh replications, one stream per theta."""
    n = trials or cfg.n_trials
    c = _cutoff(cfg)
    selection = IntervalSet.two_sided(c)
    estimates = []
    for index, theta in enumerate(cfg.theta_grid):
        rng = _stream(cfg.seed, index)
        z_o = trunc_sample_many(TruncatedNormal(theta / cfg.sigma_o, 1.0, selection), rng, n)
        z_r = theta / cfg.sigma_r + rng.standard_normal(n)
        x_o, x_r = cfg.sigma_o * z_o, cfg.sigma_r * z_r
        claimed = np.sign(z_o)
        estimates.append(
            CurveEstimate(
                theta=theta,
                trials=n,
                nonsig_same_dir=float(np.mean(~(claimed * z_r > c))),
                type_s=float(np.mean(z_o < 0)),
                ci_miss=float(np.mean(np.abs(x_o - x_r) > c * cfg.sigma_r)),
                decline=float(np.mean(claimed * x_r < claimed * x_o)),
            )
        )
    return estimates
