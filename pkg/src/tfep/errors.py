"""Exception hierarchy.

The CLI maps these onto exit codes: usage errors exit 2, data errors 3,
numerical and degeneracy errors 4.
"""


class TFEPError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class UsageError(TFEPError, ValueError):
    """Bad parameters, unknown tags, malformed flag grammar."""

    exit_code = 2


class DomainError(UsageError):
    """An argument lies outside the domain of the function."""


class DistributionError(UsageError):
    """Invalid distribution family or parameters."""


class ConfigurationError(UsageError):
    """A study configuration that cannot be run as described."""


class DataError(TFEPError, ValueError):
    """Input data is unusable (non-finite values, missing columns, too few rows)."""

    exit_code = 3

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class OverTrimmedError(DataError):
    """Fewer than two observations survive trimming."""


class NumericalError(TFEPError, ArithmeticError):
    """A numerical routine failed or a statistic is degenerate."""

    exit_code = 4


class InfiniteMomentError(NumericalError):
    """A requested population moment does not exist."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, *, estimate: float, error: float, intervals: int):
        super().__init__(
            f"{message} (estimate={estimate!r}, error_estimate={error:.3g}, intervals={intervals})"
        )
        self.estimate = estimate
        self.error = error
        self.intervals = intervals


class DegenerateError(NumericalError):
    """A confidence interval cannot be formed because a scale estimate is non-positive."""
