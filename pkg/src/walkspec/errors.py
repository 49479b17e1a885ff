"""Exception hierarchy.

Validation problems (bad input data) derive from :class:`ValidationError`;
deliberate refusals derive from :class:`Refusal`.  The CLI maps these onto
its exit codes.
"""


class WalkspecError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(WalkspecError, ValueError):
    pass


class NegativeCoefficient(ValidationError):
    pass


class MassNotOne(ValidationError):
    pass


class NoNegativeSupport(ValidationError):
    pass


class NoPositiveSupport(ValidationError):
    pass


class Biased(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class OrderTooLarge(ValidationError):
    pass


class NonPositiveLeading(ValidationError):
    pass


class NotType11(ValidationError):
    pass


class ExponentClash(ValidationError):
    pass


class MissingOrders(ValidationError):
    pass


class Inconsistent(ValidationError):
    pass


class NotE1(ValidationError):
    pass


class NoSolution(ValidationError):
    pass


class SearchSpaceTooLarge(ValidationError):
    pass


class NumericalFailure(WalkspecError, ArithmeticError):
    pass


class PrecisionExhausted(NumericalFailure):
    pass


class TailNotConverged(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class Refusal(WalkspecError):
    """The input is well formed but the requested inversion is not attempted."""


class AmbiguousLattice(Refusal):
    pass


class DegreesEqual(AmbiguousLattice):
    pass
