"""Trimmed moment estimators and distributional diagnostics.

All sums go through :func:`math.fsum`, which is exactly rounded. Besides
protecting income-scale data (values near 1e6 raised to the fourth power),
this makes every statistic independent of summation order, so statistics
of an untrimmed view coincide bit for bit with the same statistics computed
on the raw, unsorted sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateError, DomainError
from .trimming import TrimmedView


def _fsum(arr: np.ndarray) -> float:
    return math.fsum(arr.tolist())


@dataclass(frozen=True)
class MomentSummary:
    """Trimmed sample moments of one view.

    ``variance`` uses divisor ``n_tau - 1``; ``m2``, ``m3`` and ``m4`` use
    ``n_tau``. ``t_squared = m4 - variance**2`` can be non-positive for
    small ``n_tau`` because of that divisor mismatch; such summaries report
    ``t_squared_degenerate``.
    """

    mean: float
    variance: float
    m2: float
    m3: float
    m4: float
    t_squared: float
    n_tau: int

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    @property
    def variance_degenerate(self) -> bool:
        return self.variance <= 0.0

    @property
    def t_squared_degenerate(self) -> bool:
        return not self.t_squared > 0.0


def _deviations(values: np.ndarray) -> tuple[float, np.ndarray]:
    mean = _fsum(values) / values.size
    return mean, values - mean


def trimmed_mean(view: TrimmedView) -> float:
    return _fsum(view.retained) / view.n_tau


def trimmed_variance(view: TrimmedView) -> float:
    """Sum of squared deviations over ``n_tau - 1``; 0 for constant data."""
    _, d = _deviations(view.retained)
    return _fsum(d * d) / (view.n_tau - 1)


def central_moment(view: TrimmedView, k: int) -> float:
    """Central moment of order 2, 3 or 4 with divisor ``n_tau``."""
    if k not in (2, 3, 4):
        raise DomainError(f"central moment order must be 2, 3 or 4, got {k!r}")
    _, d = _deviations(view.retained)
    return _fsum(_power(d, k)) / view.n_tau


def _power(d: np.ndarray, k: int) -> np.ndarray:
    d2 = d * d
    if k == 2:
        return d2
    if k == 3:
        return d2 * d
    return d2 * d2


def t_squared(view: TrimmedView) -> float:
    """Plug-in variance of the sample variance, ``m4 - S^4``.

    Not clamped: a non-positive return value marks a degenerate view.
    """
    if view.n_tau < 3:
        raise DataError(f"T^2 needs at least 3 retained observations, got {view.n_tau}")
    return summarize(view).t_squared


def summarize(view: TrimmedView) -> MomentSummary:
    """Compute every trimmed moment in one pass over the deviations."""
    return _summary_of(view.retained)


def _summary_of(values: np.ndarray) -> MomentSummary:
    n = values.size
    mean, d = _deviations(values)
    d2 = d * d
    ss = _fsum(d2)
    variance = ss / (n - 1)
    m4 = _fsum(d2 * d2) / n
    return MomentSummary(
        mean=mean,
        variance=variance,
        m2=ss / n,
        m3=_fsum(d2 * d) / n,
        m4=m4,
        t_squared=m4 - variance * variance,
        n_tau=n,
    )


def classical_statistics(values) -> MomentSummary:
    """Untrimmed sample mean, variance and ``T^2`` on the raw sample, in input order."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise DataError(f"need at least 2 observations, got {arr.size}")
    return _summary_of(arr)


# -- diagnostics -------------------------------------------------------------


@dataclass(frozen=True)
class DiagnosticsReport:
    n: int
    mean: float
    median: float
    sd: float
    skewness: float
    kurtosis: float
    jb_statistic: float
    jb_p_value: float

    CSV_COLUMNS = ("n", "mean", "median", "sd", "skewness", "kurtosis", "jb_p_value")


def jarque_bera_p_value(statistic: float) -> float:
    # chi-square with 2 degrees of freedom has survival exp(-x/2)
    return math.exp(-0.5 * statistic)


def diagnostics(values) -> DiagnosticsReport:
    """Mean, median, SD, skewness, raw kurtosis and the Jarque-Bera test.

    Kurtosis is not excess kurtosis: a Gaussian sample gives about 3.
    """
    arr = np.asarray(values, dtype=float).ravel()
    n = arr.size
    if n < 8:
        raise DataError(f"diagnostics need at least 8 observations, got {n}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise DataError(f"non-finite value {arr[i]!r} at index {i}", index=i)
    s = _summary_of(arr)
    if s.m2 <= 0.0:
        raise DegenerateError("diagnostics undefined for zero-variance data")
    skew = s.m3 / s.m2**1.5
    kurt = s.m4 / (s.m2 * s.m2)
    jb = n / 6.0 * (skew * skew + (kurt - 3.0) ** 2 / 4.0)
    return DiagnosticsReport(
        n=n,
        mean=s.mean,
        median=float(np.median(arr)),
        sd=s.sd,
        skewness=skew,
        kurtosis=kurt,
        jb_statistic=jb,
        jb_p_value=jarque_bera_p_value(jb),
    )
