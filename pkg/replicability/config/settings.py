"""
Analysis settings with defaults, an optional key = value config file and CLI overrides.

Precedence is defaults < config file < command-line flags.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from replicability.errors import InvalidArgumentError

OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class AnalysisSettings:
    """Every tunable of the analyses and the simulator."""

    alpha0: float = 0.05
    lambda_: float = 0.5
    confidence: float = 0.95
    min_df: int = 30
    level: float = 0.95
    rho_grid: str = "0:1:0.05"
    seed: int = 20180101
    trials: int = 10000
    output_format: str = "csv"
    consistency_tolerance: float = 0.10
    monotone_grid_points: int = 201
    predictive_scan_points: int = 2000

    def __post_init__(self) -> None:
        for name in ("alpha0", "lambda_", "confidence", "level"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0 and not (name == "alpha0" and value == 1.0):
                raise InvalidArgumentError(f"{setting_key(name)} must lie in (0, 1), got {value}.")
        if self.min_df < 1:
            raise InvalidArgumentError(f"min-df must be at least 1, got {self.min_df}.")
        if self.trials < 1:
            raise InvalidArgumentError(f"trials must be at least 1, got {self.trials}.")
        if self.output_format not in OUTPUT_FORMATS:
            raise InvalidArgumentError(f"format must be one of {', '.join(OUTPUT_FORMATS)}, got {self.output_format!r}.")
        if self.monotone_grid_points < 2 or self.predictive_scan_points < 3:
            raise InvalidArgumentError("Grid and scan sizes are too small.")

    def to_dict(self) -> dict[str, Any]:
        return {setting_key(item.name): getattr(self, item.name) for item in fields(self)}


# Config-file and flag spellings that differ from the field names.
_ALIASES = {"lambda": "lambda_", "format": "output_format"}


def setting_key(field_name: str) -> str:
    """Public spelling of a field name, e.g. lambda_ -> lambda, output_format -> format."""
    for alias, name in _ALIASES.items():
        if name == field_name:
            return alias
    return field_name.replace("_", "-")


def supported_keys() -> tuple[str, ...]:
    return tuple(setting_key(item.name) for item in fields(AnalysisSettings))


def _field_name(key: str) -> str:
    normalized = key.strip().lower().replace("-", "_")
    normalized = _ALIASES.get(normalized, normalized)
    names = {item.name for item in fields(AnalysisSettings)}
    if normalized not in names:
        supported = ", ".join(supported_keys())
        raise InvalidArgumentError(f"Unknown setting {key!r}. Supported settings: {supported}")
    return normalized


def _coerce(field_name: str, raw: Any) -> Any:
    default = getattr(AnalysisSettings(), field_name)
    if isinstance(raw, type(default)):
        return raw
    text = str(raw).strip()
    try:
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError as exc:
        raise InvalidArgumentError(f"Setting {setting_key(field_name)} expects a number, got {text!r}.") from exc
    return text.strip("\"'")


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Read UTF-8 'key = value' lines; '#' starts a comment."""
    values: dict[str, Any] = {}
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        if not separator:
            raise InvalidArgumentError(f"{path}:{number}: expected 'key = value', got {raw.strip()!r}.")
        name = _field_name(key)
        values[name] = _coerce(name, value)
    return values


def resolve_settings(
    config_path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> AnalysisSettings:
    """Build settings from defaults, then the config file, then non-None overrides."""
    values: dict[str, Any] = {}
    if config_path is not None:
        values.update(read_config_file(config_path))
    for key, value in (overrides or {}).items():
        if value is not None:
            name = _field_name(key)
            values[name] = _coerce(name, value)
    return replace(AnalysisSettings(), **values)
