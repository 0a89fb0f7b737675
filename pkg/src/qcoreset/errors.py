"""Exception hierarchy shared by the library and the CLI."""


class QCoresetError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputParseError(QCoresetError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyInputError(InputParseError):
    pass


class ConfigurationError(QCoresetError, ValueError):
    """A bit width, cardinality or other setting lies outside its valid range."""

    exit_code = 2


class BudgetError(ConfigurationError):
    """The communication budget cannot accommodate even the smallest configuration."""

    def __init__(self, message, minimum=None):
        self.minimum = minimum
        if minimum is not None:
            message = f"{message} (minimum feasible budget: {minimum} bits)"
        super().__init__(message)


class DomainError(QCoresetError, ValueError):
    """A value lies outside the normalized [-1, 1] domain."""

    exit_code = 3


class NumericError(QCoresetError, ArithmeticError):
    exit_code = 3


class ExponentUnderflow(NumericError):
    """The exponent does not fit the configured exponent field; the value flushes to zero."""
