"""Weighted Brun-Titchmarsh bounds with explicit constants, and their numerical verification."""

from .errors import DomainError, PreconditionError, RangeError, ResourceError, WBTError

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "PreconditionError",
    "RangeError",
    "ResourceError",
    "WBTError",
    "__version__",
]
