"""Benjamini-Hochberg and Holm corrections over per-study p-values."""

from __future__ import annotations

from typing import Mapping

from replicability.domain.results import MultiplicityDecision, MultiplicityProcedure
from replicability.errors import InvalidArgumentError


def _sorted_items(pvals: Mapping[str, float]) -> list[tuple[str, float]]:
    for study_id, value in pvals.items():
        if not 0.0 < value <= 1.0:
            raise InvalidArgumentError(f"p-value for {study_id} must lie in (0, 1], got {value}.")
    return sorted(pvals.items(), key=lambda item: (item[1], item[0]))


def _check_level(level: float) -> None:
    if not 0.0 < level < 1.0:
        raise InvalidArgumentError(f"Multiplicity level must lie in (0, 1), got {level}.")


def bh(pvals: Mapping[str, float], q: float) -> MultiplicityDecision:
    """Step-up: reject the i* smallest with i* = max{i : p_(i) <= i q / m}."""
    _check_level(q)
    ordered = _sorted_items(pvals)
    m = len(ordered)
    cutoff = 0
    for rank, (_, value) in enumerate(ordered, start=1):
        if value <= rank * q / m:
            cutoff = rank
    # Values tied with the last rejected one share its fate.
    while 0 < cutoff < m and ordered[cutoff][1] == ordered[cutoff - 1][1]:
        cutoff += 1
    threshold = cutoff * q / m if m else 0.0
    return MultiplicityDecision(
        MultiplicityProcedure.BH, q, tuple(study_id for study_id, _ in ordered[:cutoff]), threshold, m
    )


def holm(pvals: Mapping[str, float], alpha: float) -> MultiplicityDecision:
    """Step-down: reject p_(i) while p_(i) <= alpha / (m - i + 1)."""
    _check_level(alpha)
    ordered = _sorted_items(pvals)
    m = len(ordered)
    cutoff = 0
    threshold = alpha / m if m else 0.0
    for rank, (_, value) in enumerate(ordered, start=1):
        threshold = alpha / (m - rank + 1)
        if value > threshold:
            break
        cutoff = rank
    while 0 < cutoff < m and ordered[cutoff][1] == ordered[cutoff - 1][1]:
        cutoff += 1
    return MultiplicityDecision(
        MultiplicityProcedure.HOLM, alpha, tuple(study_id for study_id, _ in ordered[:cutoff]), threshold, m
    )


def parse_multiplicity(spec: str) -> tuple[MultiplicityProcedure, float]:
    """Parse 'bh:0.10' or 'holm:0.05'."""
    name, _, raw_level = spec.partition(":")
    try:
        procedure = MultiplicityProcedure(name.strip().lower())
    except ValueError as exc:
        raise InvalidArgumentError(f"Unknown multiplicity procedure {name!r}; use bh:<q> or holm:<alpha>.") from exc
    try:
        level = float(raw_level)
    except ValueError as exc:
        raise InvalidArgumentError(f"Multiplicity level must be a number, got {raw_level!r}.") from exc
    _check_level(level)
    return procedure, level


def apply_procedure(pvals: Mapping[str, float], procedure: MultiplicityProcedure, level: float) -> MultiplicityDecision:
    if procedure is MultiplicityProcedure.BH:
        return bh(pvals, level)
    return holm(pvals, level)
