"""Exception hierarchy shared by all modules."""


class PixrecError(Exception):
    """Base class for every error raised by this package."""


class InvalidResolution(PixrecError, ValueError):
    pass


class ResolutionTooCoarse(PixrecError, ValueError):
    pass


class UnboundedShape(PixrecError, ValueError):
    pass


class GridTooLarge(PixrecError, MemoryError):
    pass


class InvalidInterval(PixrecError, ValueError):
    pass


class InvariantViolation(PixrecError, RuntimeError):
    """An internal invariant of a data structure or algorithm stage failed."""


class DegenerateCurve(PixrecError, ValueError):
    pass


class DegenerateSegment(PixrecError, ValueError):
    pass


class NonGenericLine(PixrecError, ValueError):
    """The clipping line is vertical or passes through a vertex."""


class UndefinedDistance(PixrecError, ValueError):
    pass


class UnknownShape(PixrecError, KeyError):
    pass


class CorruptInput(PixrecError, ValueError):
    """A serialized artifact (PBM, sidecar, JSON) could not be parsed."""
