"""Exception and warning types raised across the package."""


class CommonModesError(ValueError):
    """Base class for all package errors."""


class NonpositiveWidth(CommonModesError):
    pass


class GridTooNarrow(CommonModesError):
    pass


class ZeroDistribution(CommonModesError):
    pass


class GridMismatch(CommonModesError):
    pass


class NotNormalized(CommonModesError):
    pass


class OffGridMomentum(CommonModesError):
    """A tabulated momentum does not coincide with a grid point."""


class LengthMismatch(CommonModesError):
    pass


class NullState(CommonModesError):
    pass


class IndexOutOfRange(CommonModesError, IndexError):
    pass


class TooManyModes(CommonModesError):
    """The oracle was asked to expand more modes than its cap allows."""


class ParseError(CommonModesError):
    pass


class ValidationError(CommonModesError):
    pass


class OscillationWarning(UserWarning):
    """Quadrature phases vary by more than pi/4 per grid cell."""
