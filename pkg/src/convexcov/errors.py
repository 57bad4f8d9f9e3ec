"""Exception types shared by every module."""

from __future__ import annotations


class PreconditionError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class NumericalError(RuntimeError):
    """A solver failed on an input that satisfied its preconditions.

    ``diagnostics`` carries whatever state helps reproduce the failure and is
    emitted verbatim by the CLI.
    """

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
