class SpacingLabError(Exception):
    """Base class for every error raised by the package."""


class InputError(SpacingLabError, ValueError):
    """A numeric precondition on the input was violated."""


class ConfigurationError(SpacingLabError, ValueError):
    """Inconsistent or out-of-range parameters."""


class UnsupportedOperatorError(SpacingLabError):
    """The operator uses generators the requested routine cannot act with."""


class InvariantViolation(SpacingLabError, AssertionError):
    """An internal consistency check failed."""
