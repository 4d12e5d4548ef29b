"""
Orchestration of the command-line analyses.

Each ``run_*`` function takes resolved settings, calls the library operations
and returns result objects; presentation and file writing stay in the CLI.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from replicability.analysis.decline import decline_band, parse_grid
from replicability.analysis.descriptive import NaiveMetrics, naive_metrics
from replicability.analysis.fdp import external_fdp, internal_fdp, replication_fdp
from replicability.analysis.multiplicity import apply_procedure, parse_multiplicity
from replicability.analysis.reporting import Record, records_from
from replicability.analysis.selective import (
    FLAG_SATURATED,
    ci_shift,
    predictive_interval,
    shift_test,
)
from replicability.config.paths import DEFAULT_FIXTURE_FILE
from replicability.config.scenarios import ScenarioKind, SimConfig
from replicability.config.settings import AnalysisSettings
from replicability.domain.results import DeclineBand, FdpResult, MultiplicityDecision, ShiftResult
from replicability.domain.study import StudyCandidate, StudyPair
from replicability.errors import InvalidArgumentError, NotZApproximableError
from replicability.parsing.studies import parse_studies
from replicability.simulation.curves import (
    curve_ci_miss,
    curve_decline,
    curve_nonsig_same_dir,
    curve_type_s,
    curves_monte_carlo,
)
from replicability.simulation.fixture import generate_fixture
from replicability.simulation.harness import (
    harness_decline_band,
    harness_fdp,
    harness_interval_coverage,
    harness_selective_level,
)
from replicability.standardization import adjust_pvalue, replication_pvalue
from replicability.validation.eligibility import EligibilityCriteria, EligibilityReport, EligibleStudies, filter_eligible

logger = logging.getLogger(__name__)

SOURCES = ("original", "replication")
METHODS = ("internal", "external")
# p-values that underflow to 0 are kept positive for the counting procedures.
MIN_PVALUE = 1e-300


def criteria_from(settings: AnalysisSettings) -> EligibilityCriteria:
    return EligibilityCriteria(
        alpha0=settings.alpha0,
        min_df=settings.min_df,
        consistency_tolerance=settings.consistency_tolerance,
    )


def load_studies(input_path: str | Path, settings: AnalysisSettings) -> EligibleStudies:
    """Parse the study table and split it into the FDP and selective classes."""
    candidates, report = parse_studies(input_path)
    return filter_eligible(candidates, criteria_from(settings), report)


def run_validate(input_path: str | Path, settings: AnalysisSettings) -> EligibilityReport:
    return load_studies(input_path, settings).report


def _restricted(significant: Sequence[StudyCandidate], alpha: float) -> list[StudyCandidate]:
    return [candidate for candidate in significant if candidate.original.reported_p < alpha]


def _replication_pvalues(candidates: Sequence[StudyCandidate], min_df: int) -> list[float]:
    pvalues = []
    for candidate in candidates:
        try:
            p = replication_pvalue(candidate.replication, candidate.original.effect_sign, min_df)
        except NotZApproximableError as exc:
            logger.warning("Study %s dropped from the replication source: %s", candidate.study_id, exc)
            continue
        pvalues.append(min(1.0, max(p, MIN_PVALUE)))
    return pvalues


def run_fdp(
    eligible: EligibleStudies,
    settings: AnalysisSettings,
    *,
    source: str = "original",
    method: str = "internal",
    alpha: float | None = None,
) -> FdpResult:
    """
    Directional FDP estimate and upper bound for one source/method/alpha cell.

    The internal method at alpha < alpha0 restricts to originals with p < alpha
    and adjusts by alpha. The external method keeps every significant original
    and needs alpha < lambda * alpha0. The replication source restricts to
    originals with p < alpha and uses one-sided replication p-values.
    """
    if source not in SOURCES:
        raise InvalidArgumentError(f"source must be one of {', '.join(SOURCES)}, got {source!r}.")
    if method not in METHODS:
        raise InvalidArgumentError(f"method must be one of {', '.join(METHODS)}, got {method!r}.")
    alpha0 = settings.alpha0
    alpha = alpha0 if alpha is None else alpha
    if not 0.0 < alpha <= alpha0:
        raise InvalidArgumentError(f"alpha must lie in (0, alpha0 = {alpha0:g}], got {alpha}.")
    if source == "replication" and method == "external":
        raise InvalidArgumentError("The replication source has no external method; use --method internal.")
    if not eligible.significant:
        raise InvalidArgumentError("No significant univariate studies are eligible for the FDP analysis.")

    if source == "replication":
        restricted = _restricted(eligible.significant, alpha)
        pvalues = _replication_pvalues(restricted, settings.min_df)
        if not pvalues:
            raise InvalidArgumentError(f"No study has an original p-value below alpha = {alpha:g}.")
        return replication_fdp(pvalues, settings.lambda_, settings.confidence, alpha0=alpha0, alpha=alpha)

    if method == "external":
        if not alpha < settings.lambda_ * alpha0:
            raise InvalidArgumentError(
                f"--method external needs alpha < lambda * alpha0 = {settings.lambda_ * alpha0:g}, got {alpha:g}."
            )
        p_adjusted = [adjust_pvalue(c.original.reported_p, alpha0) for c in eligible.significant]
        return external_fdp(
            p_adjusted, alpha=alpha, alpha0=alpha0, lambda_=settings.lambda_, confidence=settings.confidence
        )

    restricted = _restricted(eligible.significant, alpha)
    if not restricted:
        raise InvalidArgumentError(f"No study has an original p-value below alpha = {alpha:g}.")
    p_adjusted = [adjust_pvalue(c.original.reported_p, alpha) for c in restricted]
    result = internal_fdp(p_adjusted, alpha0=alpha, lambda_=settings.lambda_, confidence=settings.confidence)
    return replace(result, alpha0=alpha0, alpha=alpha)


@dataclass
class ShiftAnalysis:
    results: list[ShiftResult]
    adjusted: bool
    level: float
    decisions: dict[str, MultiplicityDecision] = field(default_factory=dict)
    naive: NaiveMetrics | None = None

    @property
    def m(self) -> int:
        return len(self.results)

    def rejected_count(self, adjusted: bool | None = None) -> int:
        use_adjusted = self.adjusted if adjusted is None else adjusted
        return sum(1 for result in self.results if result.pvalue(use_adjusted) <= 1.0 - self.level)


def _shift_result(pair: StudyPair, settings: AnalysisSettings, adjusted: bool) -> ShiftResult:
    adjusted_test = shift_test(pair, 0.0, adjusted=True)
    unadjusted_test = shift_test(pair, 0.0, adjusted=False)
    predictive_z, predictive_effect = predictive_interval(
        pair, settings.level, adjusted=adjusted, scan_points=settings.predictive_scan_points
    )
    flags = [FLAG_SATURATED] if adjusted_test.saturated else []
    return ShiftResult(
        study_id=pair.study_id,
        z_o=pair.z_o,
        z_r=pair.z_r,
        k_o=pair.k_o,
        k_r=pair.k_r,
        pvalue_adjusted=adjusted_test.pvalue,
        pvalue_unadjusted=unadjusted_test.pvalue,
        ci_shift=ci_shift(pair, settings.level, adjusted=True, monotone_points=settings.monotone_grid_points),
        ci_shift_unadjusted=ci_shift(
            pair, settings.level, adjusted=False, monotone_points=settings.monotone_grid_points
        ),
        predictive_z=predictive_z,
        predictive_effect=predictive_effect,
        flags=tuple(flags),
    )


def run_shift(
    pairs: Sequence[StudyPair],
    settings: AnalysisSettings,
    *,
    adjusted: bool = True,
    multiplicity: Sequence[str] = (),
    track: Callable[[Sequence[StudyPair]], Iterable[StudyPair]] | None = None,
) -> ShiftAnalysis:
    """
    Per-study shift tests and intervals, multiplicity decisions and naive metrics.

    ``track`` may wrap the per-study loop, e.g. with a progress bar.
    """
    if not pairs:
        raise InvalidArgumentError("No z-approximable study pairs are eligible for the shift analysis.")
    procedures = [(spec, *parse_multiplicity(spec)) for spec in multiplicity]
    iterable = track(pairs) if track is not None else pairs
    results = [_shift_result(pair, settings, adjusted) for pair in iterable]

    threshold = 1.0 - settings.level
    pvalues = {result.study_id: max(result.pvalue(adjusted), MIN_PVALUE) for result in results}
    decisions = {spec: apply_procedure(pvalues, procedure, level) for spec, procedure, level in procedures}
    for result in results:
        result.rejections["marginal"] = result.pvalue(adjusted) <= threshold
        for spec, decision in decisions.items():
            result.rejections[spec] = result.study_id in decision.rejected_ids

    analysis = ShiftAnalysis(
        results=results,
        adjusted=adjusted,
        level=settings.level,
        decisions=decisions,
        naive=naive_metrics(pairs, settings.alpha0, settings.level),
    )
    logger.info(
        "Shift analysis: %d of %d studies rejected (%s)",
        analysis.rejected_count(),
        analysis.m,
        "adjusted" if adjusted else "unadjusted",
    )
    return analysis


def run_decline(pairs: Sequence[StudyPair], settings: AnalysisSettings) -> DeclineBand:
    if not pairs:
        raise InvalidArgumentError("No z-approximable study pairs are eligible for the decline analysis.")
    return decline_band(pairs, parse_grid(settings.rho_grid), settings.lambda_, settings.confidence)


@dataclass
class SimulationOutput:
    scenario: str
    records: list[Record]
    fixture_path: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)


def _curve_records(cfg: SimConfig) -> list[Record]:
    analytic = {
        "nonsig_same_dir": dict(curve_nonsig_same_dir(cfg)),
        "type_s": dict(curve_type_s(cfg)),
        "ci_miss": dict(curve_ci_miss(cfg)),
        "decline": dict(curve_decline(cfg)),
    }
    records = []
    for estimate in curves_monte_carlo(cfg):
        record: Record = {"theta": estimate.theta, "trials": estimate.trials}
        for name, values in analytic.items():
            simulated = getattr(estimate, name)
            record[name] = values[estimate.theta]
            record[f"{name}_mc"] = simulated
            record[f"{name}_mc_se"] = estimate.standard_error(simulated)
        records.append(record)
    return records


def run_simulate(cfg: SimConfig, output_dir: str | Path | None = None) -> SimulationOutput:
    """Run one scenario; the fixture scenario writes its study table into ``output_dir``."""
    if cfg.kind is ScenarioKind.FIXED_THETA:
        return SimulationOutput(cfg.name, _curve_records(cfg))
    if cfg.kind is ScenarioKind.MIXED_NULLS:
        rows = harness_fdp(cfg)
        records = records_from(rows, report="fdp")
        for record, row in zip(records, rows):
            record["conservative"] = row.conservative
            record["covered"] = row.covers(cfg.confidence)
        return SimulationOutput(cfg.name, records)
    if cfg.kind is ScenarioKind.BOUNDARY_DECLINE:
        return SimulationOutput(cfg.name, records_from(harness_selective_level(cfg), report="level"))
    if cfg.kind is ScenarioKind.VALIDATION:
        records = records_from(harness_selective_level(cfg), report="level")
        records += records_from(harness_interval_coverage(cfg), report="coverage")
        records += records_from(harness_decline_band(cfg), report="decline_band")
        return SimulationOutput(cfg.name, records)

    target = Path(output_dir or ".") / Path(DEFAULT_FIXTURE_FILE).name
    summary = generate_fixture(cfg, target)
    record: Record = {
        "path": summary.path,
        "n_studies": summary.n_studies,
        "n_rows": summary.n_rows,
        "small_sample_studies": summary.small_sample_studies,
    }
    return SimulationOutput(cfg.name, [record], fixture_path=summary.path)
