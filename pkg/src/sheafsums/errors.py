"""Exception types shared across the package."""


class SheafsumsError(Exception):
    """Base class for all package errors."""


class NotPrime(SheafsumsError):
    """Raised when a prime-field modulus fails the primality test."""


class ZeroArgument(SheafsumsError):
    """Raised when a discrete log (or similar) is requested at zero."""


class BadOrder(SheafsumsError):
    """Raised for a multiplicative character order that does not divide q - 1."""


class AmbientMismatch(SheafsumsError):
    """Raised when two expressions live on incompatible ambient spaces."""


class BudgetExceeded(SheafsumsError):
    """Raised when a sum would exceed the configured evaluation budget."""

    def __init__(self, needed, cap):
        super().__init__(
            f"{needed} point evaluations requested, budget is {cap} "
            "(raise max_evaluations in the run config to allow this)"
        )
        self.needed = needed
        self.cap = cap


class Unstable(SheafsumsError):
    """Raised when recurrence fitting cannot certify a unique order."""


class WrongAmbient(SheafsumsError):
    """Raised when an operation requires a specific ambient curve."""


class MissingData(SheafsumsError):
    """Raised when neither Betti numbers nor (rank, loc) data are available."""


class UnsupportedDimension(SheafsumsError):
    """Raised for family dimensions outside the supported range."""


class UnsupportedWeight(SheafsumsError):
    """Raised for numeric twist weights outside half-integers."""


class WeightError(SheafsumsError):
    """Raised when Dual is evaluated numerically on a non-weight-pure tree."""


class BadParams(SheafsumsError):
    """Raised for invalid sampler or family parameters."""


class NegativityViolation(SheafsumsError):
    """Raised when a provably nonnegative quantity comes out negative."""


class ParseError(SheafsumsError):
    """Expression-grammar error carrying a source span.

    ``span`` is a (start, end) pair of character offsets into ``source``.
    """

    def __init__(self, message, source, span):
        self.source = source
        self.span = span
        super().__init__(message)

    def caret_diagnostic(self):
        start, end = self.span
        width = max(1, end - start)
        return "{}\n{}\n{}{}".format(self.args[0], self.source, " " * start, "^" * width)
