"""Exception types shared across the package."""


class OddCurveError(Exception):
    """Base class for all package errors."""


class DimensionError(OddCurveError):
    """Array shapes or grids do not match the operation's contract."""


class ValidationError(OddCurveError):
    """Inputs violate a documented precondition."""


class AliasingError(OddCurveError):
    """Spectral content too close to (or beyond) the grid Nyquist frequency."""


class DegenerateInputError(OddCurveError):
    """An input that is identically zero where a nonzero one is required."""
