import pytest

from replicability.analysis.descriptive import naive_metrics
from replicability.errors import InvalidArgumentError
from replicability.simulation.harness import synthetic_pair


def test_naive_metrics_count_each_criterion():
    pairs = [
        synthetic_pair("A", 3.0, 1.0, 1.0, 1.0, 0.05),
        synthetic_pair("B", -2.5, -3.0, 1.0, 1.0, 0.05),
    ]

    metrics = naive_metrics(pairs)

    assert metrics.m == 2
    assert metrics.not_significant_same_direction == 0.5
    assert metrics.original_outside_replication_ci == 0.5
    assert metrics.declined == 0.5
    assert metrics.to_dict()["m"] == 2


def test_naive_metrics_needs_pairs():
    with pytest.raises(InvalidArgumentError):
        naive_metrics([])
