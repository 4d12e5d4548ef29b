"""Finite unions of disjoint open intervals on the extended real line."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from replicability.errors import InvalidArgumentError

Interval = tuple[float, float]


def _normalize(pairs: Iterable[Interval]) -> tuple[Interval, ...]:
    cleaned = sorted((float(lo), float(hi)) for lo, hi in pairs if float(lo) < float(hi))
    merged: list[list[float]] = []
    for lo, hi in cleaned:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class IntervalSet:
    """
    Sorted, pairwise disjoint open intervals.

    Construction always normalizes: empty pieces are dropped and overlapping
    or touching pieces are merged, so consecutive intervals are separated by a
    strictly positive gap.
    """

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        for lo, hi in self.intervals:
            if math.isnan(lo) or math.isnan(hi):
                raise InvalidArgumentError("Interval endpoints must not be NaN.")
        object.__setattr__(self, "intervals", _normalize(self.intervals))

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls(((-math.inf, math.inf),))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def above(cls, threshold: float) -> "IntervalSet":
        return cls(((threshold, math.inf),))

    @classmethod
    def below(cls, threshold: float) -> "IntervalSet":
        return cls(((-math.inf, threshold),))

    @classmethod
    def two_sided(cls, threshold: float) -> "IntervalSet":
        """Return (-inf, -t) U (t, inf) for a nonnegative threshold t."""
        if threshold < 0:
            raise InvalidArgumentError("Two-sided threshold must be nonnegative.")
        return cls(((-math.inf, -threshold), (threshold, math.inf)))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_full(self) -> bool:
        return self.intervals == ((-math.inf, math.inf),)

    @property
    def lower_bound(self) -> float:
        if self.is_empty:
            raise InvalidArgumentError("The empty set has no lower bound.")
        return self.intervals[0][0]

    @property
    def upper_bound(self) -> float:
        if self.is_empty:
            raise InvalidArgumentError("The empty set has no upper bound.")
        return self.intervals[-1][1]

    def contains(self, x: float) -> bool:
        return any(lo < x < hi for lo, hi in self.intervals)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        pieces: list[Interval] = []
        for lo_a, hi_a in self.intervals:
            for lo_b, hi_b in other.intervals:
                lo, hi = max(lo_a, lo_b), min(hi_a, hi_b)
                if lo < hi:
                    pieces.append((lo, hi))
        return IntervalSet(tuple(pieces))

    def affine_map(self, a: float, b: float) -> "IntervalSet":
        return affine_map(self, a, b)

    def snap(self, x: float) -> float:
        """Return x if it lies in the closure of the set, else the nearest endpoint to its left."""
        if self.is_empty:
            raise InvalidArgumentError("Cannot snap onto the empty set.")
        if x <= self.intervals[0][0]:
            return self.intervals[0][0]
        previous_hi = self.intervals[0][0]
        for lo, hi in self.intervals:
            if x < lo:
                return previous_hi
            if x <= hi:
                return x
            previous_hi = hi
        return previous_hi

    def to_list(self) -> list[list[float]]:
        return [[lo, hi] for lo, hi in self.intervals]

    def __str__(self) -> str:
        if self.is_empty:
            return "{}"
        return " U ".join(f"({lo:.6g}, {hi:.6g})" for lo, hi in self.intervals)


def _scale(x: float, a: float, b: float) -> float:
    if math.isinf(x):
        return math.copysign(math.inf, x * a)
    return a * x + b


def affine_map(s: IntervalSet, a: float, b: float) -> IntervalSet:
    """Return {a*x + b : x in s}; a negative scale reverses interval order and endpoints."""
    if a == 0 or math.isnan(a):
        raise InvalidArgumentError("affine_map requires a nonzero scale factor.")
    if math.isinf(b) or math.isnan(b):
        raise InvalidArgumentError("affine_map requires a finite shift.")
    mapped = []
    for lo, hi in s.intervals:
        new_lo, new_hi = _scale(lo, a, b), _scale(hi, a, b)
        mapped.append((min(new_lo, new_hi), max(new_lo, new_hi)))
    return IntervalSet(tuple(mapped))
