"""
Ground-truth harnesses for the estimators and tests.

Each harness simulates data from the truncated model (originals observed only
when significant, replications untruncated), applies the production
estimator, and compares it with the latent truth the data were drawn from.
Random streams are derived from ``SeedSequence(seed, spawn_key=key)`` per grid
point, so results do not depend on evaluation order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Iterable

import numpy as np
from scipy.special import ndtr, ndtri

from replicability.analysis.decline import band_row, monotone_pvalues
from replicability.analysis.fdp import external_fdp, internal_fdp
from replicability.analysis.selective import (
    ci_shift,
    decline_test,
    predictive_interval,
    selective_pvalue,
    shift_contrast,
)
from replicability.config.scenarios import SimConfig
from replicability.domain.intervals import IntervalSet
from replicability.domain.selective import SelectiveProblem
from replicability.domain.study import StudyArm, StudyPair, TestFamily
from replicability.errors import UndefinedEstimateError

logger = logging.getLogger(__name__)

MIN_REPORTED_P = 1e-300
# Interior decline rows need the claimed direction to be right almost surely.
INTERIOR_MIN_MEAN = 3.0


def stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def cutoff_for(alpha0: float) -> float:
    return -float(ndtri(alpha0 / 2.0))


def sample_selected_scores(means: np.ndarray, cutoff: float, rng: np.random.Generator) -> np.ndarray:
    """
    Draw Z ~ N(mean, 1) conditioned on |Z| > cutoff, one uniform per draw.

    Inverse CDF on each tail piece; the upper piece is inverted from its
    survival function so large means keep precision.
    """
    means = np.asarray(means, dtype=float)
    up = ndtr(means - cutoff)
    down = ndtr(-cutoff - means)
    w = rng.random(means.shape) * (up + down)
    lower = w < down
    z = np.empty_like(means)
    z[lower] = means[lower] + ndtri(np.maximum(w[lower], np.finfo(float).tiny))
    tail = np.maximum((up + down - w)[~lower], np.finfo(float).tiny)
    z[~lower] = means[~lower] - ndtri(tail)
    # Guard the open boundary against rounding.
    z = np.where(lower, np.minimum(z, np.nextafter(-cutoff, -np.inf)), np.maximum(z, np.nextafter(cutoff, np.inf)))
    return z


def synthetic_pair(study_id: str, z_o: float, z_r: float, k_o: float, k_r: float, alpha0: float) -> StudyPair:
    """A z-family study pair with exact k-factors, as produced by the simulators."""
    original = StudyArm(
        TestFamily.Z, statistic=z_o, reported_p=max(2.0 * float(ndtr(-abs(z_o))), MIN_REPORTED_P), k_override=k_o
    )
    replication = StudyArm(
        TestFamily.Z, statistic=z_r, reported_p=max(2.0 * float(ndtr(-abs(z_r))), MIN_REPORTED_P), k_override=k_r
    )
    return StudyPair(
        study_id=study_id,
        original=original,
        replication=replication,
        z_o=z_o,
        z_r=z_r,
        k_o=k_o,
        k_r=k_r,
        sign=1 if z_o > 0 else -1,
        selection=IntervalSet.two_sided(cutoff_for(alpha0)),
        alpha0=alpha0,
    )


def _rate(hits: int, trials: int) -> tuple[float, float]:
    rate = hits / trials if trials else math.nan
    se = math.sqrt(rate * (1.0 - rate) / trials) if trials else math.nan
    return rate, se


@dataclass(frozen=True)
class GroundTruth:
    """
    Latent and observed counts of one simulated FDP trial.

    R significant originals, V of them wrong in sign; B adjusted p-values at
    or above lambda, U of them from nulls; R_alpha discoveries at the stricter
    threshold, V_alpha of them wrong; N0 = V_alpha + U nulls among N = R_alpha + B.
    """

    r: int
    v: int
    b: int
    u: int
    r_alpha: int
    v_alpha: int

    @property
    def n(self) -> int:
        return self.r_alpha + self.b

    @property
    def n0(self) -> int:
        return self.v_alpha + self.u

    @property
    def true_fdp(self) -> float:
        return self.v / self.r if self.r else 0.0

    @property
    def true_fdp_alpha(self) -> float:
        return self.v_alpha / self.r_alpha if self.r_alpha else 0.0

    def identities_hold(self) -> bool:
        return (
            0 <= self.v <= self.r
            and 0 <= self.u <= self.b <= self.r
            and 0 <= self.v_alpha <= self.r_alpha
            and self.n <= self.r
            and self.n0 <= self.n
            and self.n0 <= self.v
        )


def simulate_fdp_trial(
    cfg: SimConfig, null_fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, GroundTruth]:
    """Simulate one literature; return the adjusted p-values of the significant originals."""
    n = cfg.n_candidates
    is_null = rng.random(n) < null_fraction
    magnitudes = rng.choice(np.asarray(cfg.theta_grid, dtype=float), size=n)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n)
    theta = np.where(is_null, 0.0, signs * magnitudes)
    z = theta + rng.standard_normal(n)
    p = 2.0 * ndtr(-np.abs(z))

    selected = p < cfg.alpha0
    p_adjusted = np.maximum(p[selected] / cfg.alpha0, MIN_REPORTED_P)
    wrong = (theta[selected] * np.sign(z[selected])) <= 0.0
    large = p_adjusted >= cfg.lambda_
    strict = p_adjusted < cfg.external_alpha / cfg.alpha0
    truth = GroundTruth(
        r=int(selected.sum()),
        v=int(wrong.sum()),
        b=int(large.sum()),
        u=int((large & wrong).sum()),
        r_alpha=int(strict.sum()),
        v_alpha=int((strict & wrong).sum()),
    )
    return p_adjusted, truth


@dataclass(frozen=True)
class FdpHarnessRow:
    method: str
    null_fraction: float
    trials_used: int
    mean_estimate: float
    mean_true: float
    difference_se: float
    coverage: float
    coverage_se: float
    identities_ok: bool
    at_least_true: float = math.nan

    @property
    def conservative(self) -> bool:
        return self.mean_estimate >= self.mean_true - 2.0 * self.difference_se

    def covers(self, confidence: float) -> bool:
        return self.coverage >= confidence - 2.0 * self.coverage_se


def _fdp_row(method: str, null_fraction: float, records: list[tuple[float, float, bool]], ok: bool) -> FdpHarnessRow:
    if not records:
        return FdpHarnessRow(method, null_fraction, 0, math.nan, math.nan, math.nan, math.nan, math.nan, ok, math.nan)
    estimates = np.array([record[0] for record in records])
    truths = np.array([record[1] for record in records])
    covered = sum(1 for record in records if record[2])
    difference = estimates - truths
    n = len(records)
    difference_se = float(np.std(difference, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    coverage, coverage_se = _rate(covered, n)
    return FdpHarnessRow(
        method,
        null_fraction,
        n,
        float(estimates.mean()),
        float(truths.mean()),
        difference_se,
        coverage,
        coverage_se,
        ok,
        float(np.mean(estimates >= truths)),
    )


def harness_fdp(cfg: SimConfig) -> list[FdpHarnessRow]:
    """Conservativeness and coverage of the internal and external FDP methods."""
    rows: list[FdpHarnessRow] = []
    for index, null_fraction in enumerate(cfg.null_fractions):
        rng = stream(cfg.seed, 0, index)
        internal: list[tuple[float, float, bool]] = []
        external: list[tuple[float, float, bool]] = []
        identities_ok = True
        for _ in range(cfg.n_trials):
            p_adjusted, truth = simulate_fdp_trial(cfg, null_fraction, rng)
            identities_ok = identities_ok and truth.identities_hold()
            if truth.r == 0:
                continue
            result = internal_fdp(
                list(p_adjusted), alpha0=cfg.alpha0, lambda_=cfg.lambda_, confidence=cfg.confidence
            )
            internal.append((result.estimate, truth.true_fdp, result.ucb >= truth.true_fdp))
            try:
                result = external_fdp(
                    list(p_adjusted),
                    alpha=cfg.external_alpha,
                    alpha0=cfg.alpha0,
                    lambda_=cfg.lambda_,
                    confidence=cfg.confidence,
                )
            except UndefinedEstimateError:
                continue
            external.append((result.estimate, truth.true_fdp_alpha, result.ucb >= truth.true_fdp_alpha))
        rows.append(_fdp_row("internal", null_fraction, internal, identities_ok))
        rows.append(_fdp_row("external", null_fraction, external, identities_ok))
        logger.debug("FDP harness done for null fraction %.2f", null_fraction)
    return rows


@dataclass(frozen=True)
class LevelRow:
    test: str
    theta_o: float
    theta_r: float
    k: float
    trials: int
    rejection_rate: float
    se: float


def _grid_points(cfg: SimConfig) -> Iterable[tuple[int, float, float]]:
    index = 0
    for theta in cfg.theta_grid:
        for k in cfg.k_grid:
            yield index, theta, k
            index += 1


def _shift_pvalues(z_o: np.ndarray, z_r: np.ndarray, k: float, selection: IntervalSet, delta: float) -> np.ndarray:
    contrast = shift_contrast(k, k, delta)
    return np.array(
        [selective_pvalue(SelectiveProblem(float(a), float(b), k, k, selection), contrast) for a, b in zip(z_o, z_r)]
    )


def _decline_pvalues(z_o: np.ndarray, z_r: np.ndarray, k: float, selection: IntervalSet, rho: float) -> np.ndarray:
    return np.array([decline_test(float(a), float(b), k, k, selection, rho).pvalue for a, b in zip(z_o, z_r)])


def harness_selective_level(cfg: SimConfig, nominal: float | None = None) -> list[LevelRow]:
    """
    Empirical rejection rates of the shift test (theta_O = theta_R) and of the
    decline test at its boundary theta_R = (1 - rho) theta_O and, where the
    claimed direction is reliable, in its interior theta_R = theta_O.
    """
    threshold = nominal if nominal is not None else 1.0 - cfg.level
    cutoff = cutoff_for(cfg.alpha0)
    selection = IntervalSet.two_sided(cutoff)
    n = cfg.n_trials
    rows: list[LevelRow] = []
    for index, theta, k in _grid_points(cfg):
        rng = stream(cfg.seed, 1, index)
        z_o = sample_selected_scores(np.full(n, k * theta), cutoff, rng)
        z_r = k * theta + rng.standard_normal(n)
        rate, se = _rate(int(np.sum(_shift_pvalues(z_o, z_r, k, selection, 0.0) <= threshold)), n)
        rows.append(LevelRow("shift", theta, theta, k, n, rate, se))

        boundary = (1.0 - cfg.rho) * theta
        z_r = k * boundary + rng.standard_normal(n)
        rate, se = _rate(int(np.sum(_decline_pvalues(z_o, z_r, k, selection, cfg.rho) <= threshold)), n)
        rows.append(LevelRow("decline_boundary", theta, boundary, k, n, rate, se))

        if k * theta >= INTERIOR_MIN_MEAN and cfg.rho > 0:
            z_r = k * theta + rng.standard_normal(n)
            rate, se = _rate(int(np.sum(_decline_pvalues(z_o, z_r, k, selection, cfg.rho) <= threshold)), n)
            rows.append(LevelRow("decline_interior", theta, theta, k, n, rate, se))
    return rows


@dataclass(frozen=True)
class CoverageRow:
    target: str
    theta_o: float
    theta_r: float
    k: float
    trials: int
    coverage: float
    se: float
    explicit_checked: int
    explicit_disagreements: int


def harness_interval_coverage(cfg: SimConfig) -> list[CoverageRow]:
    """
    Coverage of the predictive interval (theta_O = theta_R) and of ci_shift
    (theta_R = theta_O / 2) through test duality, with a few intervals per
    grid point inverted explicitly and compared against the duality verdict.
    """
    threshold = 1.0 - cfg.level
    cutoff = cutoff_for(cfg.alpha0)
    selection = IntervalSet.two_sided(cutoff)
    n = cfg.n_trials
    grid = list(_grid_points(cfg))
    explicit_per_point = max(1, cfg.explicit_checks // max(1, len(grid))) if cfg.explicit_checks else 0
    rows: list[CoverageRow] = []
    for index, theta, k in grid:
        rng = stream(cfg.seed, 2, index)
        z_o = sample_selected_scores(np.full(n, k * theta), cutoff, rng)

        z_r = k * theta + rng.standard_normal(n)
        accepted = _shift_pvalues(z_o, z_r, k, selection, 0.0) >= threshold
        disagreements = 0
        for trial in range(min(explicit_per_point, n)):
            pair = synthetic_pair(f"sim-{index}-{trial}", float(z_o[trial]), float(z_r[trial]), k, k, cfg.alpha0)
            z_interval, _ = predictive_interval(pair, cfg.level)
            disagreements += int(z_interval.contains(float(z_r[trial])) != bool(accepted[trial]))
        coverage, se = _rate(int(accepted.sum()), n)
        rows.append(
            CoverageRow("predictive", theta, theta, k, n, coverage, se, min(explicit_per_point, n), disagreements)
        )

        theta_r = theta / 2.0
        delta = theta - theta_r
        z_r = k * theta_r + rng.standard_normal(n)
        accepted = _shift_pvalues(z_o, z_r, k, selection, delta) >= threshold
        disagreements = 0
        for trial in range(min(explicit_per_point, n)):
            pair = synthetic_pair(f"sim-{index}-{trial}", float(z_o[trial]), float(z_r[trial]), k, k, cfg.alpha0)
            interval = ci_shift(pair, cfg.level)
            disagreements += int(interval.contains(delta) != bool(accepted[trial]))
        coverage, se = _rate(int(accepted.sum()), n)
        rows.append(
            CoverageRow("ci_shift", theta, theta_r, k, n, coverage, se, min(explicit_per_point, n), disagreements)
        )
    return rows


@dataclass(frozen=True)
class BandCoverageRow:
    rho: float
    trials: int
    mean_true_fraction: float
    mean_under: float
    mean_over: float
    coverage: float
    se: float


def harness_decline_band(cfg: SimConfig) -> list[BandCoverageRow]:
    """
    Coverage of the decline band for a literature where each study keeps a
    fraction 1 - d of its original effect, d drawn from ``decline_fractions``.

    The true fraction at rho counts studies whose oriented replication effect
    lies strictly below (1 - rho) times the oriented original effect.
    """
    cutoff = cutoff_for(cfg.alpha0)
    selection = IntervalSet.two_sided(cutoff)
    positive_thetas = np.array([theta for theta in cfg.theta_grid if theta > 0], dtype=float)
    if positive_thetas.size == 0:
        positive_thetas = np.array([1.0])
    rng = stream(cfg.seed, 3)
    m = cfg.n_studies
    rho_grid = sorted(cfg.rho_grid)
    records: dict[float, list[tuple[float, float, float, bool]]] = {rho: [] for rho in rho_grid}
    for _ in range(cfg.n_trials):
        theta_o = rng.choice(positive_thetas, size=m)
        k = rng.choice(np.asarray(cfg.k_grid, dtype=float), size=m)
        decline = rng.choice(np.asarray(cfg.decline_fractions, dtype=float), size=m)
        theta_r = (1.0 - decline) * theta_o
        z_o = sample_selected_scores(k * theta_o, cutoff, rng)
        z_r = k * theta_r + rng.standard_normal(m)
        sign = np.where(z_o > 0, 1.0, -1.0)
        raw = np.array(
            [
                [
                    decline_test(float(z_o[i]), float(z_r[i]), float(k[i]), float(k[i]), selection, rho).pvalue
                    for rho in rho_grid
                ]
                for i in range(m)
            ]
        )
        forward, backward = monotone_pvalues(raw)
        for j, rho in enumerate(rho_grid):
            row = band_row(
                forward[:, j].tolist(), rho, cfg.lambda_, cfg.confidence, complements=backward[:, j].tolist()
            )
            true_fraction = float(np.mean(sign * theta_r < (1.0 - rho) * sign * theta_o))
            covered = row.ci_lo <= true_fraction <= row.ci_hi
            records[rho].append((true_fraction, row.under, row.over, covered))

    rows = []
    for rho, values in records.items():
        coverage, se = _rate(sum(1 for value in values if value[3]), len(values))
        rows.append(
            BandCoverageRow(
                rho=rho,
                trials=len(values),
                mean_true_fraction=float(np.mean([value[0] for value in values])),
                mean_under=float(np.mean([value[1] for value in values])),
                mean_over=float(np.mean([value[2] for value in values])),
                coverage=coverage,
                se=se,
            )
        )
    return rows


def rows_to_dicts(rows: Iterable[Any]) -> list[dict[str, Any]]:
    return [asdict(row) for row in rows]
