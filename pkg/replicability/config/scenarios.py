"""Simulation scenario presets."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from replicability.errors import InvalidArgumentError

DEFAULT_SCENARIO_NAME = "example1"


class ScenarioKind(str, Enum):
    FIXED_THETA = "fixed_theta"
    MIXED_NULLS = "mixed_nulls"
    BOUNDARY_DECLINE = "boundary_decline"
    VALIDATION = "validation"
    FIXTURE = "fixture"


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one simulation run; every random stream derives from ``seed``."""

    name: str
    kind: ScenarioKind
    theta_grid: tuple[float, ...]
    alpha0: float = 0.05
    sigma_o: float = 1.0
    sigma_r: float = 1.0
    n_trials: int = 10000
    seed: int = 20180101
    k_grid: tuple[float, ...] = (1.0,)
    null_fractions: tuple[float, ...] = (0.0, 0.3, 1.0)
    n_candidates: int = 200
    external_alpha: float = 0.005
    rho: float = 0.25
    rho_grid: tuple[float, ...] = (0.0, 0.25, 0.5)
    decline_fractions: tuple[float, ...] = (0.0, 0.6)
    n_studies: int = 40
    level: float = 0.95
    lambda_: float = 0.5
    confidence: float = 0.95
    explicit_checks: int = 20

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise InvalidArgumentError(f"n_trials must be at least 1, got {self.n_trials}.")
        if not self.theta_grid:
            raise InvalidArgumentError("theta_grid must not be empty.")
        if not (self.sigma_o > 0 and self.sigma_r > 0):
            raise InvalidArgumentError("sigma_O and sigma_R must be positive.")
        if not 0.0 < self.alpha0 < 1.0:
            raise InvalidArgumentError(f"alpha0 must lie in (0, 1), got {self.alpha0}.")
        if not self.k_grid or any(k <= 0 for k in self.k_grid):
            raise InvalidArgumentError("k_grid must hold positive values.")

    def with_overrides(
        self,
        *,
        seed: int | None = None,
        trials: int | None = None,
        theta_grid: tuple[float, ...] | None = None,
    ) -> "SimConfig":
        changes = {}
        if seed is not None:
            changes["seed"] = seed
        if trials is not None:
            changes["n_trials"] = trials
        if theta_grid is not None:
            changes["theta_grid"] = tuple(theta_grid)
        return replace(self, **changes)


def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + index * step, 12) for index in range(count))


SCENARIOS: dict[str, SimConfig] = {
    "example1": SimConfig(
        name="example1",
        kind=ScenarioKind.FIXED_THETA,
        theta_grid=_grid(0.0, 5.0, 0.05),
        n_trials=1_000_000,
    ),
    "mixed_nulls": SimConfig(
        name="mixed_nulls",
        kind=ScenarioKind.MIXED_NULLS,
        theta_grid=(1.0, 2.0, 3.0, 4.0),
        null_fractions=(0.0, 0.3, 1.0),
    ),
    "boundary_decline": SimConfig(
        name="boundary_decline",
        kind=ScenarioKind.BOUNDARY_DECLINE,
        theta_grid=(0.0, 0.5, 1.0, 2.0, 3.0),
        k_grid=(1.0, 2.0, 3.0, 5.0, 8.0),
        rho=0.25,
    ),
    "validation": SimConfig(
        name="validation",
        kind=ScenarioKind.VALIDATION,
        theta_grid=(0.0, 0.5, 1.0, 2.0, 3.0),
        k_grid=(1.0, 2.0, 3.0, 5.0, 8.0),
    ),
    "fixture": SimConfig(
        name="fixture",
        kind=ScenarioKind.FIXTURE,
        theta_grid=(0.1, 0.2, 0.3, 0.5, 0.8),
        n_trials=1,
        n_studies=100,
    ),
}


def scenario_names() -> tuple[str, ...]:
    return tuple(SCENARIOS)


def get_scenario(name: str | None) -> SimConfig:
    normalized = (name or DEFAULT_SCENARIO_NAME).strip().lower()
    try:
        return SCENARIOS[normalized]
    except KeyError as exc:
        supported = ", ".join(scenario_names())
        raise ValueError(f"Unsupported scenario: {name}. Available scenarios: {supported}") from exc
