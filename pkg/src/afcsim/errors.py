"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition or schema.

    The command-line runner maps this to a distinct exit code so that
    configuration mistakes can be told apart from numerical failures.
    """


class NoLineError(ValidationError):
    """Raised when a profile has no measurable absorption line."""
