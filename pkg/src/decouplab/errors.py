"""Exception types shared across the package.

The CLI maps ConfigError to exit code 2 and any other package error raised
while running an experiment to exit code 3; everything else is a bug.
"""

from __future__ import annotations


class DecouplabError(Exception):
    """Base class for every error raised deliberately by this package."""


class DimensionError(DecouplabError, ValueError):
    """Shapes, labels or dimensions do not line up."""


class DomainError(DecouplabError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class CapError(DecouplabError, RuntimeError):
    """A configured resource cap (memory, enumeration size) would be exceeded."""


class ConfigError(DecouplabError, ValueError):
    """An experiment configuration failed validation.

    `field` names the offending entry when known, so the CLI can print a
    pointable diagnostic.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ComputationError(DecouplabError, RuntimeError):
    """A numerical routine could not produce a trustworthy result."""
