"""Exception hierarchy shared by every module."""


class AuerbachError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(AuerbachError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(AuerbachError, ValueError):
    """A matrix or vector has the wrong shape."""


class RankError(AuerbachError, ValueError):
    """A matrix that must be nonsingular is (numerically) singular."""


class SizeError(AuerbachError, ValueError):
    """The problem size exceeds what an exact search supports."""


class PreconditionError(AuerbachError, ValueError):
    """An input failed a required verification step."""


class ConsistencyError(AuerbachError, RuntimeError):
    """An internal re-verification failed; indicates a numerical breakdown."""
