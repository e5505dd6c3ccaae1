"""Domain errors with stable codes.

None of these subclass ValueError; raised inside a pydantic validator they
propagate unchanged.
"""

from typing import Any


class ArenaError(Exception):
    """Base class for all domain errors."""

    code = "arena-error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_payload(self) -> dict[str, Any]:
        """Machine-readable form printed by the CLI."""
        return {"error": {"code": self.code, "message": self.message, **self.details}}


class InvalidGraphError(ArenaError):
    code = "invalid-graph"


class InvalidPathError(ArenaError):
    code = "invalid-path"


class InvalidPlayerError(ArenaError):
    code = "invalid-player"


class InvalidInstanceError(ArenaError):
    code = "invalid-instance"


class InvalidRoutingError(ArenaError):
    code = "invalid-routing"


class NoPathError(ArenaError):
    code = "no-path"


class ResultTooLargeError(ArenaError):
    code = "result-too-large"


class SearchBudgetExceededError(ArenaError):
    code = "search-budget-exceeded"


class PreconditionError(ArenaError):
    code = "precondition"


class NoSupportSetError(ArenaError):
    code = "no-support-set"


class RejectionFailureError(ArenaError):
    code = "rejection-failure"


class ParseError(ArenaError):
    code = "parse-error"


class UnknownKeyError(ArenaError):
    code = "unknown-key"


class FormatVersionError(ArenaError):
    code = "format-version"


class SchemaError(ArenaError):
    code = "schema-error"


class ConfigError(ArenaError):
    code = "config-error"
