"""Exception types shared across the package."""


class MmotError(Exception):
    """Base class for all package errors."""


class InvalidInputError(MmotError, ValueError):
    """Malformed or inconsistent user input (dimensions, ranges, files)."""


class ResourceBudgetError(MmotError, RuntimeError):
    """An enumeration would exceed its configured subset/tuple budget."""


class ModeError(MmotError, ValueError):
    """Exact and floating-point quantities were mixed in one computation."""


class UnsupportedError(MmotError, ValueError):
    """The requested operation is not defined for the given arguments."""
