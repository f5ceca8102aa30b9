"""Typed errors. Every user-facing failure is one of these; the CLI maps them
to exit codes (syntax errors to 2, mathematical precondition failures to 1)."""


class LglError(Exception):
    """Base class for all library errors."""

    exit_code = 1

    @property
    def name(self):
        return type(self).__name__


class ParseError(LglError, ValueError):
    """Operator text does not conform to the grammar."""

    exit_code = 2

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DivisionByZeroPolynomial(LglError, ZeroDivisionError):
    exit_code = 2


class NonSplitDenominator(LglError):
    """A denominator has an irreducible factor of degree >= 2 over Q."""


class NonSplitLeadingCoefficient(NonSplitDenominator):
    """The leading coefficient of an operator does not split over Q."""


class InsufficientPrecision(LglError):
    pass


class StabilizationFailure(LglError):
    """Two truncation windows disagreed; the result would be a guess."""


class UnnormalizedEigenvalues(LglError):
    pass


class NonRationalEigenvalues(LglError):
    pass


class PrecisionTooSmall(LglError):
    pass


class ExactForm(LglError):
    """f dz is exact: the G_a formula does not apply (use the trivial case)."""


class InvalidCombination(LglError):
    pass


class NotNilpotent(LglError):
    pass


class NotUnipotent(LglError):
    pass
