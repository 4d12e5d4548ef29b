import pytest

from replicability.analysis.fdp import (
    count_large,
    external_beta,
    external_fdp,
    internal_fdp,
    replication_fdp,
    storey_estimate,
    ucb_external,
    ucb_internal,
)
from replicability.domain.results import FdpMethod
from replicability.errors import InvalidArgumentError, UndefinedEstimateError


def make_adjusted_pvalues() -> list[float]:
    """68 adjusted p-values: 22 below .02, 33 below .1, 41 below .2, 11 at or above .5."""
    return [0.01] * 22 + [0.05] * 11 + [0.15] * 8 + [0.3] * 16 + [0.7] * 11


def test_fixture_counts():
    p = make_adjusted_pvalues()

    assert len(p) == 68
    assert count_large(p, 0.5) == 11


def test_ties_at_lambda_count_as_large():
    assert count_large([0.5, 0.49, 0.51], 0.5) == 2


def test_storey_estimate_is_twice_the_large_fraction():
    estimate = storey_estimate(make_adjusted_pvalues())

    assert estimate.b == 11
    assert estimate.estimate == pytest.approx(22 / 68)


def test_storey_estimate_is_clipped_at_one():
    assert storey_estimate([0.9, 0.8]).estimate == 1.0


def test_internal_upper_bound_counts():
    assert ucb_internal(11, 68)[0] == 32
    assert ucb_internal(16, 68)[0] == 43
    assert ucb_internal(3, 22)[0] == 12


def test_internal_fdp_reports_estimate_and_bound():
    result = internal_fdp(make_adjusted_pvalues())

    assert result.method is FdpMethod.INTERNAL
    assert result.estimate == pytest.approx(22 / 68)
    assert result.bound_count == 32
    assert result.ucb == pytest.approx(32 / 68)
    assert result.lcb == 0.0
    assert result.summary() == "estimate 22 / 68 = 32%, upper bound 32 / 68 = 47%"


def test_summary_rounds_half_percent_up():
    result = internal_fdp([0.01] * 15 + [0.7])

    assert result.estimate == 0.125
    assert result.summary().startswith("estimate 2 / 16 = 13%,")


@pytest.mark.parametrize(
    ("alpha", "r_alpha", "q", "estimate"),
    [
        (0.001, 22, 13, 0.44 / 22),
        (0.005, 33, 17, 2.2 / 33),
        (0.01, 41, 20, 4.4 / 41),
    ],
)
def test_external_fdp_at_stricter_thresholds(alpha, r_alpha, q, estimate):
    result = external_fdp(make_adjusted_pvalues(), alpha=alpha)

    assert result.r_alpha == r_alpha
    assert result.b == 11
    assert result.q == q
    assert result.estimate == pytest.approx(estimate)
    assert result.ucb == pytest.approx((q - 11) / r_alpha)
    assert result.n == r_alpha + 11


def test_external_beta():
    assert external_beta(0.005, 0.05, 0.5) == pytest.approx(5 / 6)
    assert external_beta(0.001, 0.05, 0.5) == pytest.approx(25 / 26)


def test_ucb_external_scan_values():
    assert ucb_external(11, 33, 5 / 6)[0] == 17
    assert ucb_external(11, 22, 25 / 26)[0] == 13
    assert ucb_external(11, 41, 5 / 7)[0] == 20


def test_external_method_needs_alpha_below_lambda_alpha0():
    with pytest.raises(InvalidArgumentError, match="lambda \\* alpha0"):
        external_fdp(make_adjusted_pvalues(), alpha=0.03)


def test_external_estimate_is_undefined_without_strict_discoveries():
    with pytest.raises(UndefinedEstimateError):
        external_fdp([0.3, 0.6, 0.9], alpha=0.001)


def test_replication_fdp_uses_internal_machinery():
    p = [0.9] * 16 + [0.1] * 52

    result = replication_fdp(p)

    assert result.method is FdpMethod.REPLICATION
    assert result.estimate == pytest.approx(32 / 68)
    assert result.bound_count == 43


def test_invalid_pvalues_are_rejected():
    with pytest.raises(InvalidArgumentError, match="p-values"):
        storey_estimate([0.0, 0.5])
    with pytest.raises(InvalidArgumentError, match="At least one"):
        storey_estimate([])


def test_internal_bound_without_large_pvalues():
    # 0.5**4 = 0.0625 passes, 0.5**5 = 0.031 fails.
    assert ucb_internal(0, 68) == (4, 4 / 68)
