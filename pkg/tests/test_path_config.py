from pathlib import Path

from replicability.config.paths import (
    DEFAULT_DATA_DIR,
    DEFAULT_FIXTURE_FILE,
    build_output_file,
    build_result_filename,
    ensure_output_dir,
    resolve_input_path,
)


def test_default_fixture_points_to_data_folder():
    assert DEFAULT_FIXTURE_FILE == str(Path("data") / "synthetic_studies.csv")


def test_build_output_file_joins_inside_selected_output_dir(tmp_path):
    assert build_output_file(tmp_path / "run", "run_manifest.json") == str(tmp_path / "run" / "run_manifest.json")


def test_build_result_filename_appends_format():
    assert build_result_filename("fdp_results", "json") == "fdp_results.json"


def test_resolve_input_path_keeps_absolute_path(tmp_path):
    explicit_path = tmp_path / "studies.csv"

    assert resolve_input_path(str(explicit_path)) == str(explicit_path)


def test_resolve_input_path_uses_data_folder_for_bare_missing_filename():
    assert resolve_input_path("not_here.csv") == str(Path(DEFAULT_DATA_DIR) / "not_here.csv")


def test_resolve_input_path_keeps_relative_path_with_directory():
    assert resolve_input_path("extracts/rpp.csv") == str(Path("extracts") / "rpp.csv")


def test_ensure_output_dir_creates_nested_directories(tmp_path):
    target = tmp_path / "results" / "run1"

    assert ensure_output_dir(target) == str(target)
    assert target.is_dir()
