"""Exception types shared across the package."""


class WBTError(Exception):
    """Base class for all errors raised by wbt."""


class PreconditionError(WBTError, ValueError):
    """An operation was called with arguments outside its contract."""


class DomainError(PreconditionError):
    """A point lies outside the domain of a weight function."""


class RangeError(PreconditionError):
    """A table or prime list does not cover the range an operation needs."""


class ResourceError(WBTError):
    """The request would exceed the configured memory or enumeration budget."""
