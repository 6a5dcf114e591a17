"""Exception types raised by the analytics engine."""

from __future__ import annotations


class SurvbondError(Exception):
    """Base class for all package errors."""


class DomainError(SurvbondError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class CalibrationError(SurvbondError, RuntimeError):
    """A root search could not bracket or reach its target."""

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        super().__init__(message)
        self.bracket = bracket


class DegenerateTradeError(SurvbondError, RuntimeError):
    """The hedge solve produced no usable trade (all raw weights vanish)."""
