"""Exception types raised across the package."""


class RealCalcError(Exception):
    """Base class for all errors raised by realcalc."""


class ShapeError(RealCalcError, ValueError):
    """Operands have incompatible or malformed shapes."""


class NotAntiHermitianError(RealCalcError, ValueError):
    pass


class UnsupportedDimensionError(RealCalcError):
    """The operation is only defined for a restricted class of instances."""


class DegenerateError(RealCalcError, ValueError):
    pass


class MustCanonicalizeError(RealCalcError, ValueError):
    pass


class InvalidMetricError(RealCalcError, ValueError):
    pass


class SingularMetricError(InvalidMetricError):
    pass


class NoLeviCivitaError(RealCalcError):
    """No Levi-Civita connection exists for the given data."""


class HypothesisViolationError(RealCalcError, ValueError):
    pass


class ResourceError(RealCalcError):
    pass
