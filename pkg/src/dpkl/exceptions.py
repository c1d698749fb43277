"""Exception hierarchy shared across the package."""


class DPKLError(Exception):
    """Base class for all errors raised by dpkl."""


class InputError(DPKLError, ValueError):
    """Invalid argument or data supplied by the caller."""


class FitError(DPKLError, RuntimeError):
    """Maximum likelihood fitting failed."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class EstimatorError(DPKLError, ArithmeticError):
    """The spacing estimator cannot be evaluated on the given measure."""


class DegenerateBinningError(DPKLError, ValueError):
    """Prior quantile bins collapse (all prior draws equal)."""


class NumericalError(DPKLError, RuntimeError):
    """Too many non-finite divergence draws were rejected."""
