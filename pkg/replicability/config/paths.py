"""Project path configuration helpers."""

from __future__ import annotations

from pathlib import Path

DEFAULT_DATA_DIR = "data"
DEFAULT_FIXTURE_FILE = str(Path(DEFAULT_DATA_DIR) / "synthetic_studies.csv")

ELIGIBILITY_REPORT_FILENAME = "eligibility_report.json"
MANIFEST_FILENAME = "run_manifest.json"
DECLINE_SUMMARY_FILENAME = "decline_summary.json"

FDP_RESULTS_STEM = "fdp_results"
SHIFT_RESULTS_STEM = "shift_results"
DECLINE_BAND_STEM = "decline_band"
SIMULATION_STEM = "simulation"


def build_output_file(output_dir: str | Path, filename: str) -> str:
    """Return a file path inside an already selected output directory."""
    return str(Path(output_dir) / filename)


def build_result_filename(stem: str, output_format: str) -> str:
    """Return e.g. 'fdp_results.csv' for stem 'fdp_results' and format 'csv'."""
    return f"{stem}.{output_format}"


def resolve_input_path(user_input: str, base_dir: str | Path = DEFAULT_DATA_DIR) -> str:
    """Return an existing or absolute path as-is, or resolve a bare file name inside base_dir."""
    path = Path(user_input)
    if path.is_absolute() or path.exists() or path.parent != Path("."):
        return str(path)
    return build_output_file(base_dir, str(path))


def ensure_output_dir(output_dir: str | Path) -> str:
    """Create the output directory if needed and return it."""
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    return str(output_dir)
