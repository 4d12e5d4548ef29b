from dataclasses import replace
from pathlib import Path

import pytest

from replicability.analysis.pipeline import (
    load_studies,
    run_decline,
    run_fdp,
    run_shift,
    run_simulate,
    run_validate,
)
from replicability.config.scenarios import get_scenario
from replicability.config.settings import AnalysisSettings
from replicability.domain.results import FdpMethod
from replicability.domain.study import StudyArm, StudyCandidate, TestFamily
from replicability.errors import InvalidArgumentError
from replicability.simulation.harness import synthetic_pair
from replicability.validation.eligibility import filter_eligible

FIXTURE = Path(__file__).resolve().parents[1] / "data" / "synthetic_studies.csv"


@pytest.fixture(scope="module")
def eligible():
    return load_studies(FIXTURE, AnalysisSettings())


def test_bundled_fixture_class_sizes():
    report = run_validate(FIXTURE, AnalysisSettings())

    assert report.total == 100
    assert report.significant_univariate == 100
    assert report.z_approximable == 92
    assert not report.has_errors


def test_internal_fdp_uses_every_significant_original(eligible):
    result = run_fdp(eligible, AnalysisSettings())

    assert result.method is FdpMethod.INTERNAL
    assert result.r == 100
    assert 0.0 <= result.estimate <= result.ucb <= 1.0


def test_internal_fdp_at_stricter_alpha_restricts_and_keeps_alpha0(eligible):
    result = run_fdp(eligible, AnalysisSettings(), alpha=0.01)

    assert result.r == sum(1 for c in eligible.significant if c.original.reported_p < 0.01)
    assert result.alpha == 0.01
    assert result.alpha0 == 0.05


def test_external_fdp_counts_every_significant_original(eligible):
    result = run_fdp(eligible, AnalysisSettings(), method="external", alpha=0.005)

    assert result.method is FdpMethod.EXTERNAL
    assert result.r == 100
    assert result.r_alpha == sum(1 for c in eligible.significant if c.original.reported_p < 0.005)


def test_external_fdp_rejects_alpha_above_lambda_alpha0(eligible):
    with pytest.raises(InvalidArgumentError, match="lambda \\* alpha0"):
        run_fdp(eligible, AnalysisSettings(), method="external", alpha=0.03)


def test_replication_source(eligible):
    result = run_fdp(eligible, AnalysisSettings(), source="replication")

    assert result.method is FdpMethod.REPLICATION
    assert result.source == "replication"
    assert 0 < result.r <= 100


def test_unknown_source_is_rejected(eligible):
    with pytest.raises(InvalidArgumentError, match="source"):
        run_fdp(eligible, AnalysisSettings(), source="both")


def test_external_method_is_rejected_for_the_replication_source(eligible):
    with pytest.raises(InvalidArgumentError, match="external"):
        run_fdp(eligible, AnalysisSettings(), source="replication", method="external")


def test_replication_f1_without_direction_only_leaves_the_replication_source():
    original = StudyArm(TestFamily.Z, statistic=2.5, reported_p=0.0124, n_total=80)
    candidates = [
        StudyCandidate("A", original, StudyArm(TestFamily.Z, statistic=1.0, reported_p=0.3173, n_total=160), line=2),
        StudyCandidate("B", original, StudyArm(TestFamily.F1, statistic=4.0, reported_p=0.0499, df=60), line=4),
    ]
    eligible = filter_eligible(candidates)

    assert run_fdp(eligible, AnalysisSettings()).r == 2
    assert run_fdp(eligible, AnalysisSettings(), source="replication").r == 1


def test_run_shift_records_marginal_and_multiplicity_rejections():
    pairs = [
        synthetic_pair("A", 2.2, 0.1, 1.0, 1.0, 0.05),
        synthetic_pair("B", 4.5, 0.3, 1.0, 1.0, 0.05),
        synthetic_pair("C", -3.0, -2.7, 1.0, 1.5, 0.05),
    ]

    analysis = run_shift(pairs, AnalysisSettings(), multiplicity=["bh:0.10", "holm:0.05"])

    assert analysis.m == 3
    assert set(analysis.decisions) == {"bh:0.10", "holm:0.05"}
    for result in analysis.results:
        assert set(result.rejections) == {"marginal", "bh:0.10", "holm:0.05"}
        assert result.pvalue_adjusted >= 0.0
    assert analysis.rejected_count(adjusted=False) >= analysis.rejected_count(adjusted=True)
    assert analysis.naive.m == 3


def test_run_shift_needs_pairs():
    with pytest.raises(InvalidArgumentError, match="No z-approximable"):
        run_shift([], AnalysisSettings())


def test_run_decline_uses_settings_grid(eligible):
    band = run_decline(eligible.pairs, AnalysisSettings(rho_grid="0,0.25,1"))

    assert band.m == 92
    assert band.rho_grid == [0.0, 0.25, 1.0]


def test_run_simulate_curves():
    cfg = get_scenario("example1").with_overrides(theta_grid=(0.0, 1.0), trials=1000)

    output = run_simulate(cfg)

    assert output.scenario == "example1"
    assert [record["theta"] for record in output.records] == [0.0, 1.0]
    assert {"type_s", "type_s_mc", "type_s_mc_se"} <= set(output.records[0])


def test_run_simulate_fixture_writes_into_output_dir(tmp_path):
    cfg = replace(get_scenario("fixture"), n_studies=12)

    output = run_simulate(cfg, tmp_path)

    assert output.fixture_path == str(tmp_path / "synthetic_studies.csv")
    assert output.records[0]["n_rows"] == 24
