"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: BudgetExceeded -> 2,
PreconditionFailed (and subclasses) -> 3, anything else -> 1.
"""


class StrengthLabError(Exception):
    pass


class BudgetExceeded(StrengthLabError):
    """An enumeration would exceed the configured resource cap."""


class PreconditionFailed(StrengthLabError):
    pass


class InverseOfZero(PreconditionFailed, ZeroDivisionError):
    pass


class ContextMismatch(PreconditionFailed):
    pass


class DimensionMismatch(PreconditionFailed):
    pass


class DegreeMismatch(PreconditionFailed):
    pass


class CharDividesDegree(PreconditionFailed):
    pass


class ParseError(PreconditionFailed, ValueError):
    pass
