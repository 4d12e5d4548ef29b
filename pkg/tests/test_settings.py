import pytest

from replicability.config.settings import (
    AnalysisSettings,
    read_config_file,
    resolve_settings,
    setting_key,
    supported_keys,
)
from replicability.errors import InvalidArgumentError


def test_defaults():
    settings = AnalysisSettings()

    assert settings.alpha0 == 0.05
    assert settings.lambda_ == 0.5
    assert settings.confidence == 0.95
    assert settings.min_df == 30
    assert settings.rho_grid == "0:1:0.05"
    assert settings.seed == 20180101


def test_public_keys_use_cli_spelling():
    assert setting_key("lambda_") == "lambda"
    assert setting_key("output_format") == "format"
    assert setting_key("rho_grid") == "rho-grid"
    assert "min-df" in supported_keys()
    assert AnalysisSettings().to_dict()["lambda"] == 0.5


def test_read_config_file(tmp_path):
    path = tmp_path / "audit.cfg"
    path.write_text("# audit\nalpha0 = 0.01\nlambda = 0.4  # storey\nrho-grid = 0:1:0.1\n\nseed=7\n", encoding="utf-8")

    values = read_config_file(path)

    assert values == {"alpha0": 0.01, "lambda_": 0.4, "rho_grid": "0:1:0.1", "seed": 7}


def test_unknown_config_key_lists_supported_keys(tmp_path):
    path = tmp_path / "audit.cfg"
    path.write_text("alpha = 0.01\n", encoding="utf-8")

    with pytest.raises(InvalidArgumentError, match="Supported settings: alpha0, lambda"):
        read_config_file(path)


def test_config_line_without_separator_is_rejected(tmp_path):
    path = tmp_path / "audit.cfg"
    path.write_text("alpha0 0.01\n", encoding="utf-8")

    with pytest.raises(InvalidArgumentError, match="expected 'key = value'"):
        read_config_file(path)


def test_flags_win_over_config_file(tmp_path):
    path = tmp_path / "audit.cfg"
    path.write_text("confidence = 0.9\nlevel = 0.9\n", encoding="utf-8")

    settings = resolve_settings(path, {"confidence": 0.8, "level": None})

    assert settings.confidence == 0.8
    assert settings.level == 0.9


def test_non_numeric_value_is_rejected():
    with pytest.raises(InvalidArgumentError, match="expects a number"):
        resolve_settings(overrides={"alpha0": "five percent"})


@pytest.mark.parametrize(
    "overrides",
    [{"alpha0": 0.0}, {"lambda": 1.0}, {"min_df": 0}, {"format": "xml"}, {"trials": 0}],
)
def test_out_of_range_settings_are_rejected(overrides):
    with pytest.raises(InvalidArgumentError):
        resolve_settings(overrides=overrides)
