import math

import pytest

from replicability.domain.intervals import IntervalSet, affine_map
from replicability.errors import InvalidArgumentError


def test_construction_merges_touching_and_overlapping_pieces():
    s = IntervalSet(((3.0, 4.0), (0.0, 1.0), (1.0, 2.0), (3.5, 5.0), (6.0, 6.0)))

    assert s.intervals == ((0.0, 2.0), (3.0, 5.0))


def test_two_sided_excludes_the_threshold_itself():
    s = IntervalSet.two_sided(1.96)

    assert s.intervals == ((-math.inf, -1.96), (1.96, math.inf))
    assert s.contains(2.0)
    assert s.contains(-2.0)
    assert not s.contains(1.96)
    assert not s.contains(0.0)


def test_two_sided_rejects_negative_threshold():
    with pytest.raises(InvalidArgumentError, match="nonnegative"):
        IntervalSet.two_sided(-1.0)


def test_nan_endpoint_is_rejected():
    with pytest.raises(InvalidArgumentError, match="NaN"):
        IntervalSet(((math.nan, 1.0),))


def test_intersect_keeps_only_common_pieces():
    selection = IntervalSet.two_sided(1.96)

    assert selection.intersect(IntervalSet.above(0.0)).intervals == ((1.96, math.inf),)
    assert selection.intersect(IntervalSet(((-1.0, 1.0),))).is_empty


def test_affine_map_with_negative_scale_reverses_order():
    s = IntervalSet(((-math.inf, -2.0), (1.0, 3.0)))

    mapped = affine_map(s, -2.0, 1.0)

    assert mapped.intervals == ((-5.0, -1.0), (5.0, math.inf))


def test_affine_map_rejects_zero_scale():
    with pytest.raises(InvalidArgumentError, match="nonzero scale factor"):
        IntervalSet.full().affine_map(0.0, 1.0)


def test_bounds_of_a_union():
    s = IntervalSet(((-3.0, -1.0), (2.0, math.inf)))

    assert s.lower_bound == -3.0
    assert s.upper_bound == math.inf
    with pytest.raises(InvalidArgumentError):
        IntervalSet.empty().lower_bound


def test_snap_moves_gap_points_to_the_left_endpoint():
    s = IntervalSet.two_sided(2.0)

    assert s.snap(0.5) == -2.0
    assert s.snap(3.0) == 3.0
    assert s.snap(-2.0) == -2.0


def test_full_set_is_recognized():
    assert IntervalSet.full().is_full
    assert not IntervalSet.above(0.0).is_full


def test_string_form_lists_pieces():
    s = IntervalSet(((0.0, 1.0), (2.0, math.inf)))

    assert str(s) == "(0, 1) U (2, inf)"
    assert str(IntervalSet.empty()) == "{}"
    assert s.to_list() == [[0.0, 1.0], [2.0, math.inf]]


@pytest.mark.parametrize(
    ("first", "second"),
    [((2.0, -1.0), (0.5, 3.0)), ((-1.5, 0.25), (4.0, -2.0)), ((-0.3, 1.0), (-7.0, 0.0))],
)
def test_affine_maps_compose(first, second):
    s = IntervalSet(((-math.inf, -2.5), (-1.0, 0.5), (1.96, math.inf)))
    (a1, b1), (a2, b2) = first, second

    twice = affine_map(affine_map(s, a1, b1), a2, b2)
    once = affine_map(s, a1 * a2, a2 * b1 + b2)

    assert len(twice.intervals) == len(once.intervals)
    for (lo, hi), (expected_lo, expected_hi) in zip(twice.intervals, once.intervals):
        assert lo == pytest.approx(expected_lo, abs=1e-12)
        assert hi == pytest.approx(expected_hi, abs=1e-12)
