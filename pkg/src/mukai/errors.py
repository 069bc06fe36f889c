"""Exception types shared across the package."""


class MukaiError(Exception):
    """Base class for all errors raised by this package."""


class SpaceMismatchError(MukaiError):
    """Operands live on different spaces."""


class NotAProductError(MukaiError):
    """A projection operation was applied to a space that has no recorded factors."""


class SingularMatrixError(MukaiError):
    """An exact linear solve met a singular matrix.

    Carries the rank found during elimination.
    """

    def __init__(self, rank: int, size: int):
        super().__init__(f"singular matrix: rank {rank} < size {size}")
        self.rank = rank
        self.size = size


class ConstantTermError(MukaiError):
    """A formal series operation received a class with the wrong constant term."""


class BidegreeError(MukaiError):
    """A class has components outside the bidegree required by the operation."""


class ParseError(MukaiError):
    """Syntax or resolution error in the expression language."""

    def __init__(self, message: str, position: int, expected: list[str] | None = None):
        detail = f"{message} at position {position}"
        if expected:
            detail += " (expected " + " or ".join(expected) + ")"
        super().__init__(detail)
        self.position = position
        self.expected = expected or []


class SpaceFormatError(MukaiError):
    """A space description violates the file format or a ring invariant."""
