import math

import pytest
from scipy.special import ndtr

from replicability.config.scenarios import get_scenario
from replicability.simulation.curves import (
    curve_ci_miss,
    curve_decline,
    curve_nonsig_same_dir,
    curve_type_s,
    curves_monte_carlo,
)

CUTOFF = 1.959963984540054


def make_config(*thetas, trials=20_000):
    return get_scenario("example1").with_overrides(theta_grid=thetas, trials=trials)


def test_nonsig_same_dir_at_zero_effect():
    [(theta, value)] = curve_nonsig_same_dir(make_config(0.0))

    assert theta == 0.0
    assert value == pytest.approx(0.975, abs=1e-12)


def test_nonsig_same_dir_vanishes_for_large_effects():
    [(_, value)] = curve_nonsig_same_dir(make_config(5.0))

    assert value == pytest.approx(float(ndtr(CUTOFF - 5.0)), abs=1e-6)


def test_type_s_curve():
    [(_, at_zero), (_, at_one)] = curve_type_s(make_config(0.0, 1.0))

    expected = ndtr(-CUTOFF - 1.0) / (ndtr(-CUTOFF - 1.0) + ndtr(1.0 - CUTOFF))
    assert at_zero == pytest.approx(0.5)
    assert at_one == pytest.approx(float(expected), rel=1e-12)
    assert at_one == pytest.approx(0.00905, abs=5e-5)


def test_ci_miss_approaches_unselected_rate_for_large_effects():
    [(_, value)] = curve_ci_miss(make_config(10.0))

    assert value == pytest.approx(2.0 * float(ndtr(-CUTOFF / math.sqrt(2.0))), abs=1e-4)


def test_decline_curve_limits():
    [(_, at_zero), (_, at_ten)] = curve_decline(make_config(0.0, 10.0))

    assert at_zero >= 0.975
    assert at_ten == pytest.approx(0.5, abs=1e-3)


def test_curves_peak_well_above_nominal_rates():
    cfg = get_scenario("example1")

    assert max(value for _, value in curve_ci_miss(cfg)) >= 0.53
    assert max(value for _, value in curve_decline(cfg)) >= 0.83


def test_monte_carlo_agrees_with_analytic_curves():
    cfg = make_config(0.0, 1.0, 2.5)
    analytic = {
        "nonsig_same_dir": dict(curve_nonsig_same_dir(cfg)),
        "type_s": dict(curve_type_s(cfg)),
        "ci_miss": dict(curve_ci_miss(cfg)),
        "decline": dict(curve_decline(cfg)),
    }

    for estimate in curves_monte_carlo(cfg):
        assert estimate.trials == 20_000
        for name, values in analytic.items():
            expected = values[estimate.theta]
            tolerance = 4.5 * estimate.standard_error(expected) + 1e-9
            assert getattr(estimate, name) == pytest.approx(expected, abs=tolerance)


def test_monte_carlo_is_reproducible_per_seed():
    cfg = make_config(1.0, trials=500)

    assert curves_monte_carlo(cfg) == curves_monte_carlo(cfg)
    assert curves_monte_carlo(cfg) != curves_monte_carlo(cfg.with_overrides(seed=1))
