"""Exception hierarchy shared by every covertlab module."""


class CovertLabError(Exception):
    """Base class for all covertlab errors."""


class InvalidParameterError(CovertLabError, ValueError):
    """A numeric parameter lies outside its admissible range."""


class InvalidInputError(CovertLabError, ValueError):
    """Input data (bits, symbols, transcripts) is malformed."""


class CapacityError(CovertLabError, ValueError):
    """The message does not fit into the available channel resources."""

    def __init__(self, message, max_k=None):
        super().__init__(message)
        self.max_k = max_k


class ResourceError(CovertLabError, RuntimeError):
    """The requested object is too large to build at desk scale."""


class NumericFailureError(CovertLabError, ArithmeticError):
    """A numerical routine failed to converge.

    ``best_estimate`` carries the value reached before giving up.
    """

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class ConfigError(CovertLabError, ValueError):
    """An experiment configuration failed validation."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
