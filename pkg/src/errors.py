"""Exception hierarchy shared by every stage of the toolkit."""

from __future__ import annotations

from typing import Any, Optional


class HolonomyError(Exception):
    """Root of all toolkit errors."""


class InvalidArgument(HolonomyError, ValueError):
    """A scalar or configuration argument is out of range."""


class InvalidOperator(HolonomyError, ValueError):
    """An operator does not have the required Hermitian/unitary structure."""


class InvalidState(HolonomyError, ValueError):
    """A ket is not normalized or has the wrong dimension."""


class DegenerateSegment(HolonomyError, ValueError):
    """Both Rabi amplitudes vanish, so no bright state is defined."""


class InvalidPlan(HolonomyError, ValueError):
    """A plan, schedule or plan file violates its structural requirements."""


class NoSolution(HolonomyError):
    """Matching or planning has no feasible solution."""


class MatchViolation(HolonomyError):
    """Rotation-angle matching does not hold for the supplied parameters."""


class StepTooLarge(HolonomyError):
    """An integration step exceeds the stability bound."""


class NotCyclic(HolonomyError):
    """The computational subspace does not return to itself.

    The flagged report is kept on the exception so callers can still inspect it.
    """

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class PlanFileError(InvalidPlan):
    """An input file is truncated, malformed or describes an invalid plan."""
