"""Unadjusted replication metrics that ignore selection of the original studies."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Sequence

from scipy.special import ndtri

from replicability.domain.study import StudyPair
from replicability.errors import InvalidArgumentError


@dataclass(frozen=True)
class NaiveMetrics:
    m: int
    not_significant_same_direction: float
    original_outside_replication_ci: float
    declined: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def naive_metrics(pairs: Sequence[StudyPair], alpha0: float = 0.05, ci_level: float = 0.95) -> NaiveMetrics:
    """Fractions of pairs failing each naive replication criterion."""
    if not pairs:
        raise InvalidArgumentError("naive_metrics needs at least one study pair.")
    cutoff = -float(ndtri(alpha0 / 2.0))
    ci_z = -float(ndtri((1.0 - ci_level) / 2.0))
    m = len(pairs)

    not_confirmed = sum(1 for pair in pairs if not pair.sign * pair.z_r > cutoff)
    outside = sum(1 for pair in pairs if abs(pair.effect_o - pair.effect_r) > ci_z / pair.k_r)
    declined = sum(1 for pair in pairs if pair.sign * pair.effect_r < pair.sign * pair.effect_o)
    return NaiveMetrics(m, not_confirmed / m, outside / m, declined / m)
