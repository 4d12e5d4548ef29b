from dataclasses import replace

from replicability.config.scenarios import get_scenario
from replicability.parsing.studies import STUDY_COLUMNS, parse_studies
from replicability.simulation.fixture import fixture_frame, generate_fixture
from replicability.validation.eligibility import STATUS_INSUFFICIENT_DF, filter_eligible


def make_config(n_studies=24):
    return replace(get_scenario("fixture"), n_studies=n_studies)


def test_fixture_frame_has_one_row_per_arm_in_schema_order():
    frame = fixture_frame(make_config())

    assert list(frame.columns) == list(STUDY_COLUMNS)
    assert len(frame) == 48
    assert set(frame["arm"]) == {"original", "replication"}


def test_fixture_is_deterministic_per_seed():
    cfg = make_config(10)

    assert fixture_frame(cfg).equals(fixture_frame(cfg))
    assert not fixture_frame(cfg).equals(fixture_frame(replace(cfg, seed=1)))


def test_generated_fixture_parses_without_errors(tmp_path):
    summary = generate_fixture(make_config(), tmp_path / "nested" / "studies.csv")

    candidates, report = parse_studies(summary.path)
    eligible = filter_eligible(candidates, report=report)

    assert summary.n_studies == 24
    assert summary.n_rows == 48
    assert summary.small_sample_studies == 2
    assert len(candidates) == 24
    assert not eligible.report.has_errors
    assert eligible.report.significant_univariate == 24
    assert eligible.report.statuses["S012"] == STATUS_INSUFFICIENT_DF
    assert eligible.report.statuses["S024"] == STATUS_INSUFFICIENT_DF
