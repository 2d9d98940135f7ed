"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class E2LabError(Exception):
    exit_code = 1


class UsageError(E2LabError, ValueError):
    exit_code = 2


class NonCoprimeError(UsageError):
    pass


class WindowViolation(UsageError):
    """An instance parameter lies outside its allowed window."""


class HypothesisViolation(UsageError):
    """A sum was requested outside the ranges its estimate assumes.

    ``failed`` lists the inequalities that did not hold, as strings.
    """

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = list(failed)


class AdmissibilityError(UsageError):
    pass


class PrecisionExhausted(E2LabError, ArithmeticError):
    exit_code = 2


class QuadratureError(E2LabError, ArithmeticError):
    pass


class CeilingExceeded(E2LabError):
    exit_code = 3


class TruncationError(E2LabError, ArithmeticError):
    """A truncated dual sum could not be held within its error budget."""
