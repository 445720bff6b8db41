"""Exception hierarchy shared by all modules."""


class FractalCalcError(Exception):
    """Base class for every error raised by :mod:`fractalcalc`."""


class DomainError(FractalCalcError, ValueError):
    """Argument outside the domain of an operation."""


class PoleError(DomainError):
    """Gamma-type function evaluated at (or too close to) a pole."""


class ConvergenceError(FractalCalcError, ArithmeticError):
    """A series did not meet its stopping rule within the term budget."""


class NoConvergence(ConvergenceError):
    """An iterative root search failed to converge."""


class SpecError(FractalCalcError, ValueError):
    """Malformed fractal specification (IFS maps or curve generator)."""


class RangeError(DomainError):
    """Value outside the range of a staircase."""


class GridError(FractalCalcError, ValueError):
    """Grid function unsuitable for the requested operation."""


class SingularGridError(GridError):
    """Quadrature kernel is not integrable on the grid."""


class OrderError(FractalCalcError, ValueError):
    """Inadmissible operator order."""


class TruncationError(FractalCalcError, ArithmeticError):
    """Truncated-domain quadrature exceeds its tail tolerance."""


class StripError(DomainError):
    """Mellin variable outside the existence strip."""
