"""Exception hierarchy shared by all modules."""


class VisangleError(Exception):
    """Base class for every error raised by this package."""


class InvalidBody(VisangleError, ValueError):
    pass


class NotPositive(InvalidBody):
    """Support function is not strictly positive: origin not interior."""


class NotConvex(InvalidBody):
    """Radius of curvature p + p'' is not strictly positive."""


class TruncationError(InvalidBody):
    """Fourier tail of a sampled support function exceeds tolerance."""


class NoConvergence(VisangleError, ArithmeticError):
    pass


class PointNotExterior(VisangleError, ValueError):
    pass


class RootCountError(VisangleError, ArithmeticError):
    pass


class DegenerateDirection(VisangleError, ValueError):
    pass


class UnknownDensity(VisangleError, LookupError):
    pass


class UnknownIdentity(VisangleError, LookupError):
    pass


class UnknownPreset(VisangleError, LookupError):
    pass


class BadParam(VisangleError, ValueError):
    pass


class DecayCheckFailed(VisangleError, ValueError):
    pass
