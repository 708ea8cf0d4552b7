"""Shared exception types."""


class PolysieveError(Exception):
    """Base class for library-specific failures."""


class BudgetExceeded(PolysieveError):
    """A scan or sum would exceed its evaluation budget."""


class InvariantViolation(PolysieveError):
    """A runtime self-check failed; maps to CLI exit code 2."""


class PolyParseError(ValueError):
    """Polynomial text could not be parsed; carries the offending offset."""

    def __init__(self, message, pos):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos
