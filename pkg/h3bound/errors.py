"""Exceptions raised by h3bound."""

from __future__ import annotations

from typing import Any


class H3BoundError(Exception):
    """Base class for all h3bound errors."""


class GeometryError(H3BoundError):
    """Coordinates do not describe a valid point, direction or segment."""


class DegenerateDirectionError(GeometryError):
    """A direction was requested between coincident points."""


class HyperbolicRangeError(H3BoundError):
    """A value left the range representable in double precision."""


class ScheduleOverflowError(HyperbolicRangeError):
    """The bound schedule overflowed; log-domain values are attached."""

    def __init__(self, message: str, report: Any = None) -> None:
        """Initialize the error.

        Args:
            message: Human readable description
            report: Log-domain schedule or BoundReport computed before overflowing
        """
        super().__init__(message)
        self.report = report


class GraphError(H3BoundError):
    """Invalid graph, rank or path request."""


class UnreducedPathError(GraphError):
    """A directed edge path backtracks."""


class GirthPreconditionError(GraphError):
    """The girth of a length assignment is below the required bound."""


class ConvergenceError(H3BoundError):
    """An iterative method stopped without meeting its tolerance."""

    def __init__(self, message: str, best: Any = None) -> None:
        """Initialize the error.

        Args:
            message: Human readable description
            best: Best iterate reached before giving up
        """
        super().__init__(message)
        self.best = best


class ZeroLengthEdgeError(H3BoundError):
    """An incident edge has (numerically) zero length; see zero_edge_repair."""

    def __init__(self, message: str, edge: tuple[int, int] | None = None) -> None:
        """Initialize the error.

        Args:
            message: Human readable description
            edge: Endpoints of the offending edge
        """
        super().__init__(message)
        self.edge = edge


class HypothesisError(H3BoundError):
    """Inputs violate the hypotheses of the construction being applied."""


class CertificateError(H3BoundError):
    """A certificate that must hold for admissible inputs failed to validate."""

    def __init__(self, message: str, counterexample: Any = None) -> None:
        """Initialize the error.

        Args:
            message: Human readable description
            counterexample: Serializable description of the failing input
        """
        super().__init__(message)
        self.counterexample = counterexample


class DataError(H3BoundError):
    """Serialized input could not be parsed."""
