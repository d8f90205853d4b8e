"""Exception types raised by pcosync."""


class PCOError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(PCOError, ValueError):
    """An argument is outside the domain of the operation."""


class AssumptionViolationError(PCOError, ValueError):
    """A phase transition curve left [0, 2pi], so the profile cannot be certified."""


class ContractViolationError(PCOError, RuntimeError):
    """An engine step was requested in a state that does not admit it."""


class ConfigError(PCOError, ValueError):
    """A scenario file failed to parse or validate.

    ``line`` is the 1-based line of the offending entry when it can be located.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
