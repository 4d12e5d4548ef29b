import math

import numpy as np
import pytest
from scipy.special import log_ndtr, ndtr

from replicability.domain.intervals import IntervalSet
from replicability.errors import DegenerateSupportError, InvalidArgumentError
from replicability.simulation.oracles import quad_trunc_cdf
from replicability.stats.truncnorm import (
    TruncatedNormal,
    mass,
    trunc_cdf,
    trunc_pdf,
    trunc_quantile,
    trunc_sample,
    trunc_sample_many,
    trunc_sf,
)


def test_mass_of_two_sided_selection_under_standard_normal():
    assert mass(IntervalSet.two_sided(1.959963984540054), 0.0, 1.0) == pytest.approx(0.05, rel=1e-12)


def test_cdf_and_sf_are_complementary_inside_support():
    d = TruncatedNormal(0.5, 1.3, IntervalSet.two_sided(1.0))

    for x in (-4.0, -1.5, 1.2, 2.0, 5.0):
        assert trunc_cdf(x, d) + trunc_sf(x, d) == pytest.approx(1.0, abs=1e-14)


def test_cdf_is_exact_outside_support_and_flat_in_gaps():
    d = TruncatedNormal(0.0, 1.0, IntervalSet.two_sided(1.0))

    assert trunc_cdf(-math.inf, d) == 0.0
    assert trunc_cdf(math.inf, d) == 1.0
    assert trunc_cdf(-0.5, d) == pytest.approx(0.5)
    assert trunc_cdf(0.5, d) == pytest.approx(0.5)
    assert trunc_pdf(0.0, d) == 0.0


def test_half_normal_matches_closed_form():
    d = TruncatedNormal(0.0, 1.0, IntervalSet.above(0.0))

    assert trunc_cdf(1.0, d) == pytest.approx(2 * 0.8413447460685429 - 1, rel=1e-12)
    samples = trunc_sample_many(d, np.random.default_rng(3), 200_000)
    assert samples.min() > 0.0
    assert samples.mean() == pytest.approx(math.sqrt(2 / math.pi), abs=4 * 0.6028 / math.sqrt(200_000))


def test_far_tail_keeps_relative_accuracy():
    d = TruncatedNormal(-10.0, 1.0, IntervalSet.above(1.96))

    expected = math.exp(log_ndtr(-13.0) - log_ndtr(-11.96))

    assert trunc_sf(3.0, d) == pytest.approx(expected, rel=1e-8)
    assert trunc_cdf(2.5, d) == pytest.approx(quad_trunc_cdf(2.5, d), rel=1e-8)


def test_quantile_inverts_cdf():
    d = TruncatedNormal(1.0, 2.0, IntervalSet(((-math.inf, -1.0), (2.0, 6.0))))

    for p in (0.01, 0.3, 0.7, 0.99):
        assert trunc_cdf(trunc_quantile(p, d), d) == pytest.approx(p, abs=1e-9)


def test_quantile_rejects_levels_outside_unit_interval():
    d = TruncatedNormal(0.0, 1.0, IntervalSet.full())

    with pytest.raises(InvalidArgumentError):
        trunc_quantile(1.0, d)


def test_negligible_support_is_degenerate():
    with pytest.raises(DegenerateSupportError):
        TruncatedNormal(0.0, 1.0, IntervalSet(((50.0, 51.0),)))


def test_sigma_must_be_positive():
    with pytest.raises(InvalidArgumentError):
        TruncatedNormal(0.0, 0.0, IntervalSet.full())


def random_distribution(rng: np.random.Generator) -> TruncatedNormal:
    cutoff = float(rng.uniform(0.0, 3.0))
    supports = (IntervalSet.two_sided(cutoff), IntervalSet.above(cutoff), IntervalSet.below(-cutoff))
    support = supports[int(rng.integers(len(supports)))]
    return TruncatedNormal(float(rng.uniform(-2.0, 2.0)), float(rng.uniform(0.5, 2.0)), support)


@pytest.mark.slow
def test_quantile_and_cdf_round_trip_on_random_distributions():
    rng = np.random.default_rng(20240611)
    worst = 0.0
    for _ in range(200):
        d = random_distribution(rng)
        for p in rng.uniform(1e-6, 1.0 - 1e-6, size=500):
            worst = max(worst, abs(trunc_cdf(trunc_quantile(float(p), d), d) - p))

    assert worst <= 1e-9


def test_untruncated_cdf_is_the_standard_normal_cdf():
    d = TruncatedNormal(0.0, 1.0, IntervalSet.full())

    for x in np.linspace(-8.0, 8.0, 161):
        assert trunc_cdf(float(x), d) == pytest.approx(float(ndtr(x)), abs=1e-12)


@pytest.mark.parametrize(
    ("support", "x"),
    [(IntervalSet.two_sided(1.96), 2.5), (IntervalSet.two_sided(1.96), -2.2), (IntervalSet.above(1.96), 3.0)],
)
def test_cdf_is_nonincreasing_in_the_mean(support, x):
    values = [trunc_cdf(x, TruncatedNormal(float(mu), 1.0, support)) for mu in np.linspace(-3.0, 4.0, 141)]

    assert all(right <= left + 1e-14 for left, right in zip(values, values[1:]))


def test_scalar_sampler_is_reproducible_under_a_seed():
    d = TruncatedNormal(0.0, 1.0, IntervalSet.above(1.96))

    first = [trunc_sample(d, np.random.default_rng(7)) for _ in range(3)]
    second = [trunc_sample(d, np.random.default_rng(7)) for _ in range(3)]

    assert first == second
    assert all(value > 1.96 for value in first)


def test_scalar_sampler_mean_beyond_the_cutoff():
    d = TruncatedNormal(0.0, 1.0, IntervalSet.above(1.96))
    expected = math.exp(-1.96**2 / 2.0) / math.sqrt(2.0 * math.pi) / float(ndtr(-1.96))
    rng = np.random.default_rng(11)

    draws = np.array([trunc_sample(d, rng) for _ in range(5000)])

    assert expected == pytest.approx(2.3378, abs=1e-4)
    assert draws.mean() == pytest.approx(expected, abs=4.0 * draws.std() / math.sqrt(draws.size))


def test_vectorized_sampler_mean_beyond_the_cutoff():
    d = TruncatedNormal(0.0, 1.0, IntervalSet.above(1.96))

    draws = trunc_sample_many(d, np.random.default_rng(12), 1_000_000)

    assert draws.mean() == pytest.approx(2.3378, abs=0.002)
