import io
import json
import textwrap
from pathlib import Path

import pandas as pd
import pytest

from replicability.cli.main import EXIT_EMPTY, EXIT_OK, EXIT_USAGE, build_parser, main
from replicability.parsing.studies import STUDY_COLUMNS

FIXTURE = str(Path(__file__).resolve().parents[1] / "data" / "synthetic_studies.csv")
HEADER = ",".join(STUDY_COLUMNS)


def write_tmp_file(tmp_path: Path, content: str, name: str = "studies.csv") -> str:
    path = tmp_path / name
    path.write_text(textwrap.dedent(content).strip() + "\n", encoding="utf-8")
    return str(path)


def write_small_table(tmp_path: Path) -> str:
    return write_tmp_file(
        tmp_path,
        f"""
        {HEADER}
        A,original,z,2.2,,100,,,,0.0278,,,
        A,replication,z,0.1,,200,,,,0.92,,,
        B,original,z,4.5,,100,,,,0.0000068,,,
        B,replication,z,0.3,,200,,,,0.76,,,
        C,original,z,-3.0,,100,,,,0.0027,,,
        C,replication,z,-2.7,,200,,,,0.0069,,,
        """,
    )


def test_parser_accepts_global_flags_before_and_after_subcommand():
    parser = build_parser()

    before = parser.parse_args(["--quiet", "--seed", "3", "fdp"])
    after = parser.parse_args(["fdp", "--quiet", "--seed", "3"])

    assert before.quiet and after.quiet
    assert before.seed == after.seed == 3


def test_validate_bundled_fixture_prints_json_report(capsys):
    code = main(["validate", "--input", FIXTURE, "--format", "json", "--quiet"])

    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["total"] == 100
    assert report["significant_univariate"] == 100
    assert report["z_approximable"] == 92


def test_validate_writes_report_and_manifest(tmp_path):
    code = main(["validate", "--input", FIXTURE, "--out", str(tmp_path), "--quiet"])

    manifest = json.loads((tmp_path / "run_manifest.json").read_text(encoding="utf-8"))
    assert code == EXIT_OK
    assert (tmp_path / "eligibility_report.json").is_file()
    assert manifest["command"] == "validate"
    assert len(manifest["input_sha256"]) == 64


def test_validate_reports_row_errors_with_line_numbers(tmp_path, capsys):
    path = write_tmp_file(
        tmp_path,
        f"""
        {HEADER}
        A,original,z,2.2,,100,,,,0.0278,,,
        A,replication,z,oops,,200,,,,0.92,,,
        """,
    )

    code = main(["validate", "--input", path])

    assert code == EXIT_USAGE
    assert "line 3" in capsys.readouterr().err


def test_validate_schema_error_exits_with_usage_code(tmp_path):
    path = write_tmp_file(tmp_path, "study_id,arm,notes\n")

    assert main(["validate", "--input", path, "--quiet"]) == EXIT_USAGE


def test_no_significant_study_exits_with_empty_code(tmp_path):
    path = write_tmp_file(
        tmp_path,
        f"""
        {HEADER}
        A,original,z,1.2,,100,,,,0.23,,,
        A,replication,z,0.1,,200,,,,0.92,,,
        """,
    )

    assert main(["validate", "--input", path, "--quiet"]) == EXIT_EMPTY
    assert main(["fdp", "--input", path, "--quiet"]) == EXIT_EMPTY


def test_missing_input_file_is_a_usage_error(tmp_path):
    assert main(["fdp", "--input", str(tmp_path / "missing.csv"), "--quiet"]) == EXIT_USAGE


def test_fdp_writes_csv_table_to_stdout(capsys):
    code = main(["fdp", "--input", FIXTURE, "--quiet"])

    table = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert code == EXIT_OK
    assert table.loc[0, "method"] == "internal"
    assert table.loc[0, "r"] == 100


def test_fdp_external_with_too_large_alpha_is_a_usage_error(capsys):
    code = main(["fdp", "--input", FIXTURE, "--method", "external", "--alpha", "0.03"])

    assert code == EXIT_USAGE
    assert "0.025" in capsys.readouterr().err


def test_fdp_external_method_on_replication_source_is_a_usage_error(capsys):
    code = main(["fdp", "--input", FIXTURE, "--source", "replication", "--method", "external"])

    assert code == EXIT_USAGE
    assert "original source only" in capsys.readouterr().err


def test_fdp_json_output_with_manifest(tmp_path):
    code = main(
        ["fdp", "--input", FIXTURE, "--method", "external", "--alpha", "0.005", "--format", "json", "--out", str(tmp_path), "-q"]
    )

    document = json.loads((tmp_path / "fdp_results.json").read_text(encoding="utf-8"))
    manifest = json.loads((tmp_path / "run_manifest.json").read_text(encoding="utf-8"))
    assert code == EXIT_OK
    assert document["rows"][0]["method"] == "external"
    assert manifest["configuration"]["method"] == "external"
    assert manifest["configuration"]["alpha"] == 0.005


def test_config_file_with_unknown_key_is_a_usage_error(tmp_path):
    config = tmp_path / "audit.cfg"
    config.write_text("colour = blue\n", encoding="utf-8")

    assert main(["fdp", "--input", FIXTURE, "--config", str(config), "--quiet"]) == EXIT_USAGE


def test_shift_writes_results_with_multiplicity_columns(tmp_path):
    path = write_small_table(tmp_path)
    out = tmp_path / "results"

    code = main(["shift", "--input", path, "--multiplicity", "bh:0.10", "--out", str(out), "--quiet"])

    table = pd.read_csv(out / "shift_results.csv")
    assert code == EXIT_OK
    assert list(table["study_id"]) == ["A", "B", "C"]
    assert "rejected_bh:0.10" in table.columns
    assert "ci_shift_lo" in table.columns


def test_decline_writes_band_and_summary(tmp_path):
    code = main(["decline", "--input", FIXTURE, "--rho-grid", "0,0.25", "--out", str(tmp_path), "--quiet"])

    band = pd.read_csv(tmp_path / "decline_band.csv")
    summary = json.loads((tmp_path / "decline_summary.json").read_text(encoding="utf-8"))
    assert code == EXIT_OK
    assert list(band["rho"]) == [0.0, 0.25]
    assert summary["m"] == 92
    assert set(summary["headline"]) == {"0", "0.25"}


def test_decline_rejects_bad_grid():
    assert main(["decline", "--input", FIXTURE, "--rho-grid", "1:0:0.1", "--quiet"]) == EXIT_USAGE


def test_simulate_is_byte_identical_for_equal_seeds(tmp_path):
    args = ["simulate", "--scenario", "example1", "--theta-grid", "0,1", "--trials", "2000", "--seed", "11", "-q"]

    assert main([*args, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main([*args, "--out", str(tmp_path / "b")]) == EXIT_OK

    first = (tmp_path / "a" / "simulation_example1.csv").read_bytes()
    assert first == (tmp_path / "b" / "simulation_example1.csv").read_bytes()
    manifest = json.loads((tmp_path / "a" / "run_manifest.json").read_text(encoding="utf-8"))
    assert manifest["seed"] == 11
    assert manifest["input_sha256"] is None


def test_simulated_fixture_validates(tmp_path):
    assert main(["simulate", "--scenario", "fixture", "--out", str(tmp_path), "--quiet"]) == EXIT_OK

    fixture = tmp_path / "synthetic_studies.csv"
    assert fixture.is_file()
    assert main(["validate", "--input", str(fixture), "--quiet"]) == EXIT_OK


def test_unknown_format_is_rejected_by_argparse():
    with pytest.raises(SystemExit) as exc_info:
        main(["fdp", "--format", "xml"])

    assert exc_info.value.code == 2
