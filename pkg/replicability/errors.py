"""Exception types shared by the analysis modules."""

from __future__ import annotations


class ReplicabilityError(Exception):
    """Base class for every error raised by the replicability package."""


class InvalidArgumentError(ReplicabilityError, ValueError):
    """Raised when an operation precondition is violated."""


class DegenerateSupportError(InvalidArgumentError):
    """Raised when a truncation set carries (numerically) zero probability."""


class NotSelectedError(InvalidArgumentError):
    """Raised when a p-value is not below the selection threshold."""


class NotZApproximableError(ReplicabilityError):
    """Raised when a study arm cannot be standardized to a unit-variance z-score."""


class UndefinedEstimateError(ReplicabilityError):
    """Raised when an estimator has no discoveries to divide by."""


class SchemaError(ReplicabilityError):
    """Raised when a study table header does not match the documented schema."""


class StudyParseError(ReplicabilityError):
    """Raised when a study table cannot be read at all."""
