"""Exception hierarchy shared by all modules."""


class AttractorError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(AttractorError, ValueError):
    """Degenerate bounds, mismatched grids or regions outside the frame."""


class OutOfBoundsError(AttractorError):
    """A map or dilation carried occupied cells outside the grid bounds."""


class EmptySetError(AttractorError, ValueError):
    """An operation that is undefined on the empty set received one."""


class ContractivityError(AttractorError, ValueError):
    """A contractive system was required but some map has factor >= 1."""


class ConvergenceError(AttractorError):
    """An iteration exhausted its budget; ``trace`` holds what was computed."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NestednessError(AttractorError):
    """An iteration that must be nested produced a set not inside its predecessor."""


class DisconnectedError(AttractorError, ValueError):
    """Shape classification was asked about a set that is not a continuum."""


class InconclusiveShapeError(AttractorError):
    """Evidence neither stabilised nor grew strictly; no rank can be assigned."""


class NotRepellingError(AttractorError, ValueError):
    """The fixed point used to seed a repulsion basin is not repelling."""


class ConfigError(AttractorError, ValueError):
    """Invalid configuration document. ``line`` is 1-based when known."""

    def __init__(self, message, line=None, key=None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.key = key
