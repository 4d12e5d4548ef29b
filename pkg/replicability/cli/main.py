"""CLI entry point for the replicability analyses and the simulator."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Mapping, Sequence

from replicability.analysis.decline import parse_grid
from replicability.analysis.pipeline import (
    METHODS,
    SOURCES,
    criteria_from,
    load_studies,
    run_decline,
    run_fdp,
    run_shift,
    run_simulate,
)
from replicability.analysis.reporting import (
    build_run_manifest,
    decline_records,
    decline_summary,
    fdp_records,
    percent,
    serialize_table,
    shift_records,
    to_json,
    write_run_manifest,
    write_table,
    write_text,
)
from replicability.cli.ui import (
    configure_logging,
    print_app_header,
    print_error,
    print_error_panel,
    print_info,
    print_key_value_table,
    print_section,
    print_success,
    print_warning,
    track_progress,
)
from replicability.config.paths import (
    DECLINE_BAND_STEM,
    DECLINE_SUMMARY_FILENAME,
    DEFAULT_FIXTURE_FILE,
    ELIGIBILITY_REPORT_FILENAME,
    FDP_RESULTS_STEM,
    SHIFT_RESULTS_STEM,
    SIMULATION_STEM,
    ensure_output_dir,
    resolve_input_path,
)
from replicability.config.scenarios import DEFAULT_SCENARIO_NAME, get_scenario, scenario_names
from replicability.config.settings import OUTPUT_FORMATS, AnalysisSettings, read_config_file, resolve_settings
from replicability.errors import InvalidArgumentError, ReplicabilityError, SchemaError, StudyParseError
from replicability.parsing.studies import parse_studies
from replicability.validation.eligibility import EligibilityReport, EligibleStudies, filter_eligible

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_EMPTY = 3

MAX_LISTED_ISSUES = 20


class UsageError(Exception):
    """A command-line option combination that cannot be run."""


def _global_options() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset after it.
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--input", "-i", dest="input_path", help=f"Study table CSV. Defaults to {DEFAULT_FIXTURE_FILE}.")
    common.add_argument("--out", "-o", dest="output_dir", help="Output directory. Tables go to stdout when omitted.")
    common.add_argument("--seed", type=int, help="Random seed for simulations.")
    common.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS, help="Table format (csv or json).")
    common.add_argument("--config", dest="config_path", help="Optional key = value settings file; flags win.")
    common.add_argument("--quiet", "-q", action="store_true", help="Only print errors on stderr.")
    common.add_argument("--verbose", "-v", action="store_true", help="Print debug logging on stderr.")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(
        prog="replicability-audit",
        description="Selection-adjusted replicability analysis of original/replication study pairs.",
        parents=[common],
    )
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", parents=[common], help="Parse the study table and report eligibility.")
    validate.add_argument("--schema-version", default="1", help="Study table schema version.")
    validate.add_argument("--alpha0", type=float, help="Selection threshold of the originals.")
    validate.add_argument("--min-df", type=int, help="Smallest df treated as z-approximable.")

    fdp = commands.add_parser("fdp", parents=[common], help="Directional FDP estimate and upper bound.")
    fdp.add_argument("--source", choices=SOURCES, default="original", help="p-values of the originals or the replications.")
    fdp.add_argument("--method", choices=METHODS, default="internal", help="Internal or external comparison.")
    fdp.add_argument("--alpha", type=float, help="Stricter threshold; defaults to alpha0.")
    fdp.add_argument("--alpha0", type=float, help="Selection threshold of the originals.")
    fdp.add_argument("--lambda", dest="lambda_", type=float, help="Split point for large p-values.")
    fdp.add_argument("--confidence", type=float, help="Confidence of the upper bound.")

    shift = commands.add_parser("shift", parents=[common], help="Per-study effect-shift tests and intervals.")
    shift.add_argument("--level", type=float, help="Confidence level of the intervals.")
    adjustment = shift.add_mutually_exclusive_group()
    adjustment.add_argument("--adjusted", dest="adjusted", action="store_true", default=True, help="Condition on selection (default).")
    adjustment.add_argument("--unadjusted", dest="adjusted", action="store_false", help="Ignore selection.")
    shift.add_argument(
        "--multiplicity",
        action="append",
        default=[],
        metavar="PROC:LEVEL",
        help="Multiplicity correction, e.g. bh:0.10 or holm:0.05. Repeatable.",
    )
    shift.add_argument("--alpha0", type=float, help="Selection threshold of the originals.")

    decline = commands.add_parser("decline", parents=[common], help="Decline estimates and band over a rho grid.")
    decline.add_argument("--rho-grid", help="start:stop:step or a comma list, e.g. 0:1:0.05.")
    decline.add_argument("--lambda", dest="lambda_", type=float, help="Split point for large p-values.")
    decline.add_argument("--confidence", type=float, help="Per-side confidence of the band.")
    decline.add_argument("--alpha0", type=float, help="Selection threshold of the originals.")

    simulate = commands.add_parser("simulate", parents=[common], help="Selection-bias curves and validation harnesses.")
    simulate.add_argument("--scenario", choices=scenario_names(), default=DEFAULT_SCENARIO_NAME, help="Scenario preset.")
    simulate.add_argument("--trials", type=int, help="Monte Carlo trials per grid point.")
    simulate.add_argument("--theta-grid", help="start:stop:step or a comma list of effect sizes.")
    return parser


def _settings_overrides(args: argparse.Namespace) -> dict[str, Any]:
    keys = ("alpha0", "lambda_", "confidence", "level", "rho_grid", "seed", "trials", "output_format", "min_df")
    return {key: getattr(args, key, None) for key in keys}


def _resolve_settings(args: argparse.Namespace) -> AnalysisSettings:
    try:
        return resolve_settings(getattr(args, "config_path", None), _settings_overrides(args))
    except (InvalidArgumentError, OSError) as exc:
        raise UsageError(str(exc)) from exc


def _input_path(args: argparse.Namespace) -> str:
    path = resolve_input_path(getattr(args, "input_path", None) or DEFAULT_FIXTURE_FILE)
    if not Path(path).is_file():
        raise UsageError(f"Input file not found: {path}")
    return path


def _print_issues(report: EligibilityReport) -> None:
    if report.errors:
        details = [issue.format() for issue in report.errors[:MAX_LISTED_ISSUES]]
        if len(report.errors) > MAX_LISTED_ISSUES:
            details.append(f"... and {len(report.errors) - MAX_LISTED_ISSUES} more")
        print_error_panel(f"{len(report.errors)} row error(s)", details)
    for issue in report.warnings[:MAX_LISTED_ISSUES]:
        print_warning(issue.format())


def _print_counts(report: EligibilityReport) -> None:
    print_key_value_table(
        "Eligibility",
        [
            ("Studies", str(report.total)),
            ("Malformed", str(report.malformed)),
            ("Significant univariate", str(report.significant_univariate)),
            ("z-approximable", str(report.z_approximable)),
        ],
    )


def _load(args: argparse.Namespace, settings: AnalysisSettings) -> tuple[str, EligibleStudies]:
    path = _input_path(args)
    print_info(f"Input: {path}")
    eligible = load_studies(path, settings)
    _print_issues(eligible.report)
    _print_counts(eligible.report)
    return path, eligible


def _emit(
    args: argparse.Namespace,
    settings: AnalysisSettings,
    *,
    command: str,
    stem: str,
    records: Sequence[Mapping[str, Any]],
    input_path: str | None,
    configuration: Mapping[str, Any],
    extra: Mapping[str, Any] | None = None,
) -> None:
    """Write the table and the run manifest to --out, or the table to stdout."""
    output_dir = getattr(args, "output_dir", None)
    if output_dir is None:
        sys.stdout.write(serialize_table(list(records), settings.output_format, extra))
        return
    ensure_output_dir(output_dir)
    path = write_table(list(records), output_dir=output_dir, stem=stem, output_format=settings.output_format, extra=extra)
    manifest = build_run_manifest(
        command=command,
        configuration={**settings.to_dict(), **configuration},
        input_path=input_path,
        seed=settings.seed,
    )
    write_run_manifest(manifest, output_dir=output_dir)
    print_success(f"Results written to {path}")


def cmd_validate(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    path = _input_path(args)
    print_section("Validation")
    print_info(f"Input: {path}")
    try:
        candidates, report = parse_studies(path, schema_version=args.schema_version)
    except (SchemaError, StudyParseError) as exc:
        print_error(str(exc))
        return EXIT_USAGE
    eligible = filter_eligible(candidates, criteria_from(settings), report)
    report = eligible.report
    _print_issues(report)
    _print_counts(report)

    output_dir = getattr(args, "output_dir", None)
    if output_dir is not None:
        ensure_output_dir(output_dir)
        write_text(output_dir, ELIGIBILITY_REPORT_FILENAME, to_json(report.to_dict()))
        write_run_manifest(
            build_run_manifest(command="validate", configuration=settings.to_dict(), input_path=path, seed=None),
            output_dir=output_dir,
        )
    elif settings.output_format == "json":
        sys.stdout.write(to_json(report.to_dict()))

    if report.has_errors:
        return EXIT_USAGE
    if not eligible.significant:
        print_error("No study is eligible for analysis.")
        return EXIT_EMPTY
    print_success("Study table is valid")
    return EXIT_OK


def cmd_fdp(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    alpha = args.alpha if args.alpha is not None else settings.alpha0
    if args.source == "replication" and args.method == "external":
        raise UsageError("--method external applies to the original source only.")
    if args.source == "original" and args.method == "external" and not alpha < settings.lambda_ * settings.alpha0:
        raise UsageError(
            f"--method external needs --alpha below lambda * alpha0 = {settings.lambda_ * settings.alpha0:g}."
        )
    print_section("Directional FDP")
    path, eligible = _load(args, settings)
    if not eligible.significant:
        print_error("No significant univariate study is eligible for the FDP analysis.")
        return EXIT_EMPTY

    result = run_fdp(eligible, settings, source=args.source, method=args.method, alpha=alpha)
    print_key_value_table(
        f"{args.source} source, {result.method.value} method, alpha = {alpha:g}",
        [
            ("Estimate", f"{result.estimate_count:.3g} / {result.denominator} = {percent(result.estimate)}%"),
            ("Upper bound", f"{result.bound_count} / {result.denominator} = {percent(result.ucb)}%"),
            ("Large p-values (B)", str(result.b)),
        ],
    )
    _emit(
        args,
        settings,
        command="fdp",
        stem=FDP_RESULTS_STEM,
        records=fdp_records([result]),
        input_path=path,
        configuration={"source": args.source, "method": args.method, "alpha": alpha},
    )
    return EXIT_OK


def cmd_shift(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    print_section("Effect shift")
    path, eligible = _load(args, settings)
    if not eligible.pairs:
        print_error("No z-approximable study pair is eligible for the shift analysis.")
        return EXIT_EMPTY

    def track(pairs):
        return track_progress(pairs, description="Inverting shift tests", total=len(pairs))

    analysis = run_shift(
        eligible.pairs, settings, adjusted=args.adjusted, multiplicity=args.multiplicity, track=track
    )
    m = analysis.m
    rows = [
        ("Adjusted rejections", f"{analysis.rejected_count(True)} / {m}"),
        ("Unadjusted rejections", f"{analysis.rejected_count(False)} / {m}"),
    ]
    for spec, decision in analysis.decisions.items():
        listed = ", ".join(decision.rejected_ids) or "none"
        rows.append((spec, f"{decision.count} / {m} ({listed})"))
    if analysis.naive is not None:
        rows.append(("Naive: not significant", f"{percent(analysis.naive.not_significant_same_direction)}%"))
        rows.append(("Naive: outside replication CI", f"{percent(analysis.naive.original_outside_replication_ci)}%"))
        rows.append(("Naive: declined", f"{percent(analysis.naive.declined)}%"))
    print_key_value_table("Shift tests", rows)

    _emit(
        args,
        settings,
        command="shift",
        stem=SHIFT_RESULTS_STEM,
        records=shift_records(analysis.results),
        input_path=path,
        configuration={"adjusted": args.adjusted, "multiplicity": list(args.multiplicity)},
    )
    return EXIT_OK


def cmd_decline(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    try:
        parse_grid(settings.rho_grid)
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from exc
    print_section("Effect decline")
    path, eligible = _load(args, settings)
    if not eligible.pairs:
        print_error("No z-approximable study pair is eligible for the decline analysis.")
        return EXIT_EMPTY

    band = run_decline(eligible.pairs, settings)
    summary = decline_summary(band)
    rows = []
    for rho, headline in summary["headline"].items():
        rows.append(
            (
                f"rho = {rho}",
                f"under {headline['under_percent']}%, over {headline['over_percent']}%, "
                f"band ({headline['ci_lo_percent']}%, {headline['ci_hi_percent']}%)",
            )
        )
    print_key_value_table(f"Decline over {band.m} studies", rows)

    _emit(
        args,
        settings,
        command="decline",
        stem=DECLINE_BAND_STEM,
        records=decline_records(band),
        input_path=path,
        configuration={},
        extra={"summary": summary},
    )
    output_dir = getattr(args, "output_dir", None)
    if output_dir is not None:
        write_text(output_dir, DECLINE_SUMMARY_FILENAME, to_json(summary))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    settings = _resolve_settings(args)
    config_values = read_config_file(args.config_path) if getattr(args, "config_path", None) else {}
    trials = args.trials if args.trials is not None else config_values.get("trials")
    try:
        theta_grid = tuple(parse_grid(args.theta_grid)) if args.theta_grid else None
        cfg = get_scenario(args.scenario).with_overrides(seed=settings.seed, trials=trials, theta_grid=theta_grid)
    except (InvalidArgumentError, ValueError) as exc:
        raise UsageError(str(exc)) from exc

    print_section(f"Simulation: {cfg.name}")
    print_info(f"Seed {cfg.seed}, {cfg.n_trials} trials per grid point")
    output_dir = getattr(args, "output_dir", None)
    fixture_dir = output_dir or "."
    if output_dir is not None:
        ensure_output_dir(output_dir)
    result = run_simulate(cfg, fixture_dir)
    if result.fixture_path:
        print_success(f"Synthetic study table written to {result.fixture_path}")

    _emit(
        args,
        settings,
        command="simulate",
        stem=f"{SIMULATION_STEM}_{cfg.name}",
        records=result.records,
        input_path=None,
        configuration={
            "scenario": cfg.name,
            "trials": cfg.n_trials,
            "theta_grid": list(cfg.theta_grid),
        },
    )
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "fdp": cmd_fdp,
    "shift": cmd_shift,
    "decline": cmd_decline,
    "simulate": cmd_simulate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(quiet=getattr(args, "quiet", False), verbose=getattr(args, "verbose", False))
    print_app_header()
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print_error(str(exc))
        return EXIT_USAGE
    except (SchemaError, StudyParseError) as exc:
        print_error(str(exc))
        return EXIT_USAGE
    except ReplicabilityError as exc:
        print_error(str(exc))
        return EXIT_FAILURE
    except Exception as exc:  # noqa: BLE001
        logger.debug("Unexpected failure", exc_info=True)
        print_error(f"Unexpected failure: {exc}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
