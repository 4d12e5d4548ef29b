def test_analysis_modules_are_importable():
    from replicability.analysis.decline import decline_band
    from replicability.analysis.fdp import external_fdp, internal_fdp, replication_fdp
    from replicability.analysis.multiplicity import bh, holm
    from replicability.analysis.selective import ci_shift, decline_test, predictive_interval, selective_test

    assert callable(decline_band)
    assert callable(external_fdp)
    assert callable(internal_fdp)
    assert callable(replication_fdp)
    assert callable(bh)
    assert callable(holm)
    assert callable(ci_shift)
    assert callable(decline_test)
    assert callable(predictive_interval)
    assert callable(selective_test)


def test_cli_and_simulation_modules_are_importable():
    from replicability.cli.main import build_parser, main
    from replicability.simulation.curves import curves_monte_carlo
    from replicability.simulation.fixture import generate_fixture
    from replicability.simulation.harness import harness_fdp

    assert callable(build_parser)
    assert callable(main)
    assert callable(curves_monte_carlo)
    assert callable(generate_fixture)
    assert callable(harness_fdp)
