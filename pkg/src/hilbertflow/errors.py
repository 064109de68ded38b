"""Exception types raised across the package."""


class HilbertFlowError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(HilbertFlowError, ValueError):
    pass


class ShapeError(HilbertFlowError, ValueError):
    pass


class NotSymmetricError(HilbertFlowError, ValueError):
    pass


class ModelFileError(HilbertFlowError, ValueError):
    """Malformed custom-model file. Carries the offending row/column when known."""

    def __init__(self, message, path=None, row=None, column=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        prefix = ", ".join(loc)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.row = row
        self.column = column


class NumericalFailureError(HilbertFlowError, ArithmeticError):
    """Iterative eigensolver did not converge."""

    def __init__(self, message, off_norm=None):
        super().__init__(message)
        self.off_norm = off_norm


class StepError(HilbertFlowError):
    """A reduction step could not be completed.

    ``dimension`` is the dimension of the Hamiltonian the step was applied to,
    filled in by the driver when available.
    """

    def __init__(self, message, dimension=None):
        super().__init__(message)
        self.dimension = dimension

    def __str__(self):
        msg = super().__str__()
        if self.dimension is not None:
            return f"{msg} (at dimension {self.dimension})"
        return msg


class DegenerateAnchorError(StepError):
    """Ground state has (numerically) no weight on the anchor basis state."""


class ComplexRootsError(StepError):
    """The renormalisation quadratic has no real solution."""


class NoSolutionError(StepError):
    """Both the quadratic and linear coefficients vanish."""


class NearSingularDenominatorError(StepError):
    """The eliminated-state propagator diverges at the chosen coupling."""


class ResidualError(StepError):
    """The direct constraint residual at the chosen root exceeds tolerance."""
