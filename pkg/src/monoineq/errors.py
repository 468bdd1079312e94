"""Exception hierarchy shared by every module."""

from __future__ import annotations


class MonoIneqError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MonoIneqError, ValueError):
    """Malformed or unsupported input (bad indices, mixed directions, ...)."""


class SourceError(InputError):
    """A parse error pointing into the offending text."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{line}:{column}: {message}")


class ResourceExhausted(MonoIneqError):
    """A search cap was hit before the answer was known. Never means UNSAT."""


class BoundIncomplete(MonoIneqError):
    """A bounded search found nothing, but the bound does not justify UNSAT."""


class InternalConsistencyError(MonoIneqError, AssertionError):
    """A structural guarantee was violated; this indicates a bug."""
