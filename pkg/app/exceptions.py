"""Error kinds raised by the hedgehog services.

Every class carries the CLI exit status it maps to. Verdicts such as an
undecided certificate or scan violations are returned as data instead.
"""


class HedgehogError(Exception):
    exit_code = 1

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class InvalidArgumentError(HedgehogError, ValueError):
    pass


class DomainViolationError(HedgehogError, ValueError):
    """A point lies outside the domain of a height function."""


class NegativeRadicandError(HedgehogError, ArithmeticError):
    """The radicand of f is negative beyond rounding noise (transcription bug)."""


class EulerViolationError(HedgehogError, ArithmeticError):
    """Hess phi(p) has no eigenvalue near zero, so its derivative data is wrong."""


class NearSingularError(HedgehogError, ArithmeticError):
    pass


class OnCurveError(HedgehogError, ValueError):
    pass


class DegenerateRayError(HedgehogError, ArithmeticError):
    pass


class ParabolicAmbiguityError(HedgehogError, ArithmeticError):
    """A preimage has R_h close to zero, so the query point is not a regular value."""


class EmptyRegionError(HedgehogError, ValueError):
    pass


class OutputError(HedgehogError, OSError):
    pass
