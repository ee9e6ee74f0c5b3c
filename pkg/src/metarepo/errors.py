"""Exception types shared across the repository, warehouse, and query layers."""

from __future__ import annotations


class MetarepoError(Exception):
    """Base class for all domain errors raised by this package."""


class ValidationError(MetarepoError):
    """Structural invariant violations, carried as a list of messages."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NotFoundError(MetarepoError):
    """A referenced object (concept, association, link, table) does not exist."""


class ConflictError(MetarepoError):
    """The operation conflicts with recorded state (retroactive write,
    retired object, duplicate name or coordinate)."""


class QueryError(MetarepoError):
    """A well-formed request that cannot be evaluated (inapplicable method,
    unknown attribute, empty aggregate list, ...)."""


class RecordError(MetarepoError):
    """A malformed record in an interchange file; names the line and field."""

    def __init__(self, line: int, field: str, message: str):
        self.line = line
        self.field = field
        super().__init__(f"line {line}: field '{field}': {message}")
