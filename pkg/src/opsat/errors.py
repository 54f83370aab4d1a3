"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so the command line
front end can map failures to exit statuses and reports.
"""

from __future__ import annotations


class OpsatError(Exception):
    code = "error"

    def __init__(self, message: str, *, code: str | None = None, context: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.context = context

    def __str__(self) -> str:
        msg = super().__str__()
        if self.context:
            return f"{msg} (at {self.context})"
        return msg


class InputError(OpsatError):
    """Malformed or inconsistent user input."""

    code = "input"


class ParseError(InputError):
    """A document could not be read into a domain object.

    ``code`` is one of ``malformed``, ``arity_mismatch``,
    ``undeclared_variable``, ``unknown_relation`` or ``invalid_value``.
    """

    code = "malformed"


class CapExceeded(OpsatError):
    """A documented desk-scale limit was hit."""

    code = "cap_exceeded"


class PredicateError(OpsatError):
    """An operator failed a required predicate (Hermitian, involution, ...)."""

    code = "predicate"


class VerificationError(OpsatError):
    """A produced or supplied object failed exact re-verification."""

    code = "verification"


__all__ = [
    "OpsatError",
    "InputError",
    "ParseError",
    "CapExceeded",
    "PredicateError",
    "VerificationError",
]
