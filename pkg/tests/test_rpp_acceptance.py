"""
Reanalysis checks against a user-built extract of the reproducibility project.

The extract is not redistributed; see docs/rpp_extract_recipe.md. These tests
are skipped unless REPLICABILITY_RPP_EXTRACT names that table.
"""

import os
from pathlib import Path

import pytest

from replicability.analysis.pipeline import load_studies, run_decline, run_fdp, run_shift
from replicability.analysis.reporting import percent
from replicability.config.settings import AnalysisSettings

EXTRACT = os.environ.get("REPLICABILITY_RPP_EXTRACT")

pytestmark = pytest.mark.skipif(
    not EXTRACT or not Path(EXTRACT).is_file(),
    reason="REPLICABILITY_RPP_EXTRACT is not set",
)


@pytest.fixture(scope="module")
def settings():
    return AnalysisSettings()


@pytest.fixture(scope="module")
def eligible(settings):
    return load_studies(EXTRACT, settings)


@pytest.fixture(scope="module")
def shift_analysis(eligible, settings):
    return run_shift(eligible.pairs, settings, multiplicity=["bh:0.10", "holm:0.05"])


def test_class_sizes(eligible):
    assert eligible.report.significant_univariate == 68
    assert eligible.report.z_approximable == 46


def test_internal_fdp_headline(eligible, settings):
    result = run_fdp(eligible, settings)

    assert (result.b, result.r, result.bound_count) == (11, 68, 32)
    assert percent(result.estimate) == 32
    assert percent(result.ucb) == 47


@pytest.mark.parametrize(
    ("alpha", "r_alpha", "bound_count"),
    [(0.001, 22, 2), (0.005, 33, 6), (0.01, 41, 9)],
)
def test_external_fdp_grid(eligible, settings, alpha, r_alpha, bound_count):
    result = run_fdp(eligible, settings, method="external", alpha=alpha)

    assert result.r_alpha == r_alpha
    assert result.bound_count == bound_count


def test_external_fdp_at_half_percent(eligible, settings):
    result = run_fdp(eligible, settings, method="external", alpha=0.005)

    assert percent(result.estimate) == 7
    assert percent(result.ucb) == 18


def test_replication_fdp_headline(eligible, settings):
    result = run_fdp(eligible, settings, source="replication")

    assert (result.b, result.r, result.bound_count) == (16, 68, 43)
    assert percent(result.estimate) == 47
    assert percent(result.ucb) == 63


def test_shift_rejection_counts(shift_analysis):
    assert shift_analysis.m == 46
    assert shift_analysis.rejected_count(adjusted=True) == 7
    assert shift_analysis.rejected_count(adjusted=False) == 18
    assert shift_analysis.decisions["bh:0.10"].count == 5
    assert shift_analysis.decisions["holm:0.05"].count == 1


def test_decline_headline(eligible, settings):
    band = run_decline(eligible.pairs, settings)
    full = band.row_at(0.0)
    quarter = band.row_at(0.25)

    assert percent(full.under) == 35
    assert percent(full.over) == 100
    assert (percent(full.ci_lo), percent(full.ci_hi)) == (11, 100)
    assert percent(quarter.under) == 22
