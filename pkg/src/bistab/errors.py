"""Exception hierarchy shared by every bistab module."""


class BistabError(Exception):
    """Base class for all errors raised by the package."""


class ParameterError(BistabError, ValueError):
    """Invalid physical or numerical input."""


class NonPositiveFrequency(ParameterError):
    pass


class NegativeOccupation(ParameterError):
    pass


class NegativeIntensity(ParameterError):
    pass


class ShapeMismatch(ParameterError):
    pass


class DimensionOverflow(ParameterError):
    pass


class NumericalFailure(BistabError, ArithmeticError):
    """A solver failed to converge or produced non-finite output."""


class StepUnderflow(NumericalFailure):
    pass


class NotAFixedPoint(NumericalFailure):
    pass


class TruncationBreach(BistabError):
    """Fock-space cutoff population exceeded the trust threshold."""


class CutoffTooSmall(TruncationBreach):
    pass
