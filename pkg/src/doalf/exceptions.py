"""Exception hierarchy shared across the package."""


class DoalfError(Exception):
    """Base class for all package errors."""


class InvalidParameter(DoalfError, ValueError):
    pass


class DegenerateGeometry(DoalfError, ValueError):
    """Two points that must be distinct coincide (bearing or 1/d undefined)."""


class OutOfModelRange(DoalfError, ValueError):
    """Distance below the reference distance of the path-loss model."""


class DimensionError(DoalfError, ValueError):
    pass


class ParseError(DoalfError, ValueError):
    """Malformed database or config file.

    ``line`` is the 1-based line number of the offending row, when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SingularFim(DoalfError, ArithmeticError):
    """Fisher information matrix determinant at or below tolerance."""

    def __init__(self, message, theta=None, aps=None, det=None):
        super().__init__(message)
        self.theta = theta
        self.aps = aps
        self.det = det


class SingularTerm(DoalfError, ArithmeticError):
    """A per-AP term of the closed-form bound has a zero denominator."""
