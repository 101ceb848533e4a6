"""Exception hierarchy.

Two families matter to callers: :class:`FormatError` for malformed input
(files, meshes, dimensions) and :class:`MathError` for inputs that are
well-formed but fail a mathematical precondition.  The CLI maps them to
exit codes 2 and 1 respectively.
"""

from __future__ import annotations

__all__ = [
    "QuasiCopulaError",
    "FormatError",
    "MathError",
    "MeshError",
    "NotSorted",
    "EndpointsNotUnit",
    "TooFew",
    "DimensionMismatch",
    "IndexOutOfRange",
    "MeshMismatch",
    "MalformedJson",
    "BadRational",
    "UnknownName",
    "NotGrounded",
    "NotTwoIncreasing",
    "ZeroFunction",
    "NotQuasiCopula",
    "AlphaTooSmall",
    "BaseHasZeroCell",
    "IsCopula",
    "RoundingBrokeAxioms",
    "OverlappingIntervals",
    "StagesNotConsecutive",
    "TooFewLevels",
    "NotInSpan",
    "BoundViolated",
]


class QuasiCopulaError(Exception):
    """Base class for every error raised by this package."""


class FormatError(QuasiCopulaError, ValueError):
    """Structurally invalid input."""


class MathError(QuasiCopulaError, ValueError):
    """Input violates a mathematical precondition."""


# -- meshes and grids -------------------------------------------------------


class MeshError(FormatError):
    """Breakpoints do not form a valid mesh of the unit interval."""


class NotSorted(MeshError):
    pass


class EndpointsNotUnit(MeshError):
    pass


class TooFew(MeshError):
    pass


class DimensionMismatch(FormatError):
    pass


class IndexOutOfRange(FormatError, IndexError):
    pass


class MeshMismatch(FormatError):
    pass


# -- parsing ----------------------------------------------------------------


class MalformedJson(FormatError):
    pass


class BadRational(FormatError):
    pass


class UnknownName(FormatError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


# -- mathematical preconditions ---------------------------------------------


class NotGrounded(MathError):
    pass


class NotTwoIncreasing(MathError):
    pass


class ZeroFunction(MathError):
    pass


class NotQuasiCopula(MathError):
    pass


class AlphaTooSmall(MathError):
    """A residual margin of the completion is negative."""


class BaseHasZeroCell(MathError):
    pass


class IsCopula(MathError):
    pass


class RoundingBrokeAxioms(MathError):
    pass


class OverlappingIntervals(MathError):
    pass


class StagesNotConsecutive(MathError):
    pass


class TooFewLevels(MathError):
    pass


class NotInSpan(MathError):
    pass


class BoundViolated(QuasiCopulaError, AssertionError):
    """A certified error bound failed; indicates a bug, not bad data."""
