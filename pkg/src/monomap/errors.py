"""Exception types shared across the library and mapped to CLI exit codes."""


class MonomapError(Exception):
    """Base class for all library errors."""


class InputError(MonomapError):
    """Malformed input file, JSON schema violation, or bad flag value."""


class SingularMatrixError(MonomapError):
    """A matrix that must be invertible (dominant map, basis) is singular."""


class PreconditionError(MonomapError):
    """A documented precondition of an operation fails (certified, not numeric)."""


class SearchExhausted(MonomapError):
    """A heuristic search ran out of budget; carries the attempt log.

    Never a refutation: the searched-for object may still exist.
    """

    def __init__(self, message, log=None):
        super().__init__(message)
        self.log = log if log is not None else []


class InsufficientData(MonomapError):
    """Sequence too short for the requested verdict; .needed holds the minimum."""

    def __init__(self, message, needed=None):
        super().__init__(message)
        self.needed = needed


class DegenerateLiftError(MonomapError):
    """All retried random lifts failed to induce a fine mixed subdivision."""


class DegeneratePolytopeError(MonomapError):
    """A polytope that must be full-dimensional is not."""


class PrecisionExhausted(MonomapError):
    """Eigenvalue disks still overlap at the maximum working precision."""
