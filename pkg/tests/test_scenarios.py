import pytest

from replicability.config.scenarios import ScenarioKind, SimConfig, get_scenario, scenario_names
from replicability.errors import InvalidArgumentError


def test_default_scenario_is_example1():
    cfg = get_scenario(None)

    assert cfg.name == "example1"
    assert cfg.kind is ScenarioKind.FIXED_THETA
    assert len(cfg.theta_grid) == 101
    assert cfg.theta_grid[1] == 0.05
    assert cfg.theta_grid[-1] == 5.0


def test_lookup_is_case_insensitive():
    assert get_scenario(" Mixed_Nulls ").kind is ScenarioKind.MIXED_NULLS


def test_unknown_scenario_lists_available_names():
    with pytest.raises(ValueError, match="Unsupported scenario: nope. Available scenarios: example1"):
        get_scenario("nope")


def test_every_scenario_is_registered_under_its_own_name():
    for name in scenario_names():
        assert get_scenario(name).name == name


def test_with_overrides_replaces_only_given_fields():
    cfg = get_scenario("validation")

    changed = cfg.with_overrides(seed=7, trials=50)

    assert changed.seed == 7
    assert changed.n_trials == 50
    assert changed.theta_grid == cfg.theta_grid
    assert cfg.n_trials == 10000


def test_invalid_configurations_are_rejected():
    with pytest.raises(InvalidArgumentError, match="theta_grid"):
        SimConfig("x", ScenarioKind.FIXED_THETA, theta_grid=())
    with pytest.raises(InvalidArgumentError, match="k_grid"):
        SimConfig("x", ScenarioKind.FIXED_THETA, theta_grid=(1.0,), k_grid=(0.0,))
