"""Exception types shared across the package."""


class MedcovError(Exception):
    """Base class for errors raised by medcov."""


class ConfigError(MedcovError):
    """Invalid run configuration (bad flag value, malformed config file)."""


class DataError(MedcovError):
    """Malformed input data (ragged CSV row, non-numeric cell)."""


class NumericalError(MedcovError):
    """Numerical failure (factorization breakdown, inconsistent cross-check)."""


class ConvergenceError(NumericalError):
    """An iterative procedure hit its iteration cap.

    Carries the last iterate and the residual (displacement or
    off-diagonal norm) reached when the cap was hit.
    """

    def __init__(self, message, *, last=None, residual=None):
        super().__init__(message)
        self.last = last
        self.residual = residual
