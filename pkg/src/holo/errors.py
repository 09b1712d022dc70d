"""Exception types shared across the package.

Every error raised on purpose by the library derives from HoloError so the
command line layer can map failure classes to stable exit codes.
"""


class HoloError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(HoloError):
    """Operands have incompatible or unsupported shapes."""


class NotAntiHermitian(HoloError):
    """A matrix required to be anti-hermitian failed the tolerance check."""


class NotUnitary(HoloError):
    """A matrix required to be (close to) unitary failed the tolerance check."""


class InvalidPair(HoloError):
    """An elementary rotation was requested for a level pair outside
    {1,2} x {3,4}."""


class PoleAtPoint(HoloError):
    """A closed-form table entry was evaluated at a singular point of its
    tangent/cotangent factors."""


class NotTabulated(HoloError):
    """No closed-form table entry exists for the requested component."""


class LoopNotClosed(HoloError):
    """A loop's segments do not return to the base point."""


class NonCommutingPlane(HoloError):
    """A surface-integral holonomy was requested on a plane where the two
    connection components do not commute."""
