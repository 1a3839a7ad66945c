"""Exception hierarchy.

Each family carries the CLI exit code it maps to, so the command layer can
translate any failure without a lookup table of its own.
"""

from __future__ import annotations


class CompMCError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ConfigError(CompMCError, ValueError):
    """Invalid arguments, config documents or preconditions."""

    exit_code = 2


class DataError(CompMCError, ValueError):
    """Malformed or inconsistent input data."""

    exit_code = 3


class SchemaError(DataError):
    def __init__(self, column: str, message: str | None = None):
        self.column = column
        super().__init__(message or f"missing column {column!r}")


class ParseError(DataError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class OrderingError(DataError):
    pass


class GapError(DataError):
    pass


class RangeError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class EmptySelectionError(DataError):
    pass


class DomainError(DataError):
    """A value falls outside the domain of a formula (e.g. log of a non-positive)."""


class DegenerateRatesError(DataError):
    pass


class UndefinedPurityError(DataError):
    pass


class FitError(CompMCError):
    exit_code = 4


class UnderdeterminedError(FitError):
    pass


class RankDeficiencyError(FitError):
    pass


class DivergenceError(FitError):
    """Non-finite objective or gradient; ``state`` holds the last finite iterate."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class PropagationError(FitError):
    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step {step}: {message}")


class SelectionError(FitError):
    pass


class BindingError(ConfigError):
    pass


class SimulationError(CompMCError):
    """Too many trials aborted during a run."""

    exit_code = 5
