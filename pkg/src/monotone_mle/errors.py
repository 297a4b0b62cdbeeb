"""Exception hierarchy.

Every error raised on bad input derives from ``MonotoneMLEError`` (itself a
``ValueError``) so callers can catch the whole family at once.
"""

from __future__ import annotations


class MonotoneMLEError(ValueError):
    """Base class for input and configuration errors."""


class StructuralError(MonotoneMLEError):
    """Table shape problems: empty tables, empty levels, length mismatches, bad indices."""


class DomainError(MonotoneMLEError):
    """A parameter value lies outside the family's parameter interval."""


class ObservabilityError(MonotoneMLEError):
    """An observation has zero density for every parameter value of the family."""

    def __init__(self, family: str, level: int, index: int, value: float) -> None:
        self.family = family
        self.level = level
        self.index = index
        self.value = value
        super().__init__(
            f"{family}: observation {value!r} at level {level}, index {index} is not observable"
        )


class FormatError(MonotoneMLEError):
    """Malformed or unordered tabular input."""


class ConfigurationError(MonotoneMLEError):
    """An invalid combination of study or command options."""
