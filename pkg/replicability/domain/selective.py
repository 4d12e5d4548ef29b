"""Inputs of the selective z-test: the observed problem and the tested contrast."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from replicability.domain.intervals import IntervalSet
from replicability.errors import InvalidArgumentError


class Tail(str, Enum):
    TWO_SIDED_EQUAL_TAIL = "two_sided_equal_tail"
    LOWER_TAIL = "lower_tail"
    UPPER_TAIL = "upper_tail"


@dataclass(frozen=True)
class SelectiveProblem:
    """
    Observed unit-variance scores (z_O, z_R) where only z_O was truncated.

    The selection event applies to z_O alone; z_R is an untruncated draw.
    """

    z_o: float
    z_r: float
    k_o: float
    k_r: float
    selection: IntervalSet
    sign: int = 1

    def __post_init__(self) -> None:
        if not (self.k_o > 0 and self.k_r > 0):
            raise InvalidArgumentError("k-factors must be positive.")
        if not (math.isfinite(self.z_o) and math.isfinite(self.z_r)):
            raise InvalidArgumentError("z-scores must be finite.")
        if not self.selection.contains(self.z_o):
            raise InvalidArgumentError(f"z_O={self.z_o:.6g} lies outside the selection event {self.selection}.")

    def with_replication(self, z_r: float) -> "SelectiveProblem":
        return SelectiveProblem(self.z_o, z_r, self.k_o, self.k_r, self.selection, self.sign)

    def with_selection(self, selection: IntervalSet) -> "SelectiveProblem":
        return SelectiveProblem(self.z_o, self.z_r, self.k_o, self.k_r, selection, self.sign)


@dataclass(frozen=True)
class Contrast:
    """Linear contrast eta' mu = delta tested against the chosen tail."""

    eta1: float
    eta2: float
    delta: float = 0.0
    side: Tail = Tail.TWO_SIDED_EQUAL_TAIL

    def __post_init__(self) -> None:
        if not self.eta1 > 0:
            raise InvalidArgumentError(f"eta1 must be positive, got {self.eta1}.")
        if not math.isfinite(self.eta2) or not math.isfinite(self.delta):
            raise InvalidArgumentError("eta2 and delta must be finite.")

    @property
    def norm_squared(self) -> float:
        return self.eta1 * self.eta1 + self.eta2 * self.eta2

    def scaled(self, factor: float) -> "Contrast":
        """Return the contrast c*eta with delta rescaled so the null is unchanged."""
        if not factor > 0:
            raise InvalidArgumentError("Contrast scale factor must be positive.")
        return Contrast(self.eta1 * factor, self.eta2 * factor, self.delta * factor, self.side)

    def with_delta(self, delta: float) -> "Contrast":
        return Contrast(self.eta1, self.eta2, delta, self.side)
