"""Asymptotic confidence intervals for trimmed means, variances, mean differences and variance ratios.

Every interval is symmetric and normal-theory: ``estimate +/- z / scale``.
On an untrimmed view the trimmed statistics reduce to the classical
functional-empirical-process (FEP) ones and the interval is tagged ``fep``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Literal

from .errors import DegenerateError, DomainError, UsageError
from .estimators import MomentSummary, classical_statistics, summarize
from .special import normal_ppf
from .trimming import TrimmedView

ScalingMode = Literal["delta-corrected", "paper-literal"]
SCALING_MODES: tuple[str, ...] = ("delta-corrected", "paper-literal")

Target = Literal["mean", "variance", "mean-difference", "variance-ratio"]

NEGATIVE_LOWER = "lower bound below zero for a non-negative parameter"


@dataclass(frozen=True)
class ConfidenceInterval:
    estimate: float
    lower: float
    upper: float
    level: float
    method: Literal["fep", "tfep"]
    target: Target
    scaling_mode: ScalingMode | None = None
    n_tau: int | None = None
    n1_tau: int | None = None
    n2_tau: int | None = None
    tau: float | None = None
    warnings: tuple[str, ...] = ()

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def alpha(self) -> float:
        return 1.0 - self.level

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        out = {
            "target": self.target,
            "method": self.method,
            "scaling_mode": self.scaling_mode,
            "estimate": self.estimate,
            "lower": self.lower,
            "upper": self.upper,
            "level": self.level,
        }
        if self.n_tau is not None:
            out["n_tau"] = self.n_tau
        else:
            out["n1_tau"] = self.n1_tau
            out["n2_tau"] = self.n2_tau
        if self.tau is not None:
            out["tau"] = self.tau
        out["warnings"] = list(self.warnings)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ConfidenceInterval:
        fields = dict(data)
        fields["warnings"] = tuple(fields.get("warnings", ()))
        return cls(**fields)

    def replace(self, **changes) -> ConfidenceInterval:
        return ConfidenceInterval(**{**asdict(self), **changes})


@dataclass(frozen=True)
class TwoSampleScaling:
    a_hat: float
    b_hat: float
    t1_sq: float
    t2_sq: float
    mode: ScalingMode


def z_quantile(p: float) -> float:
    """Standard normal quantile, e.g. ``z_quantile(0.975) = 1.959964...``."""
    return normal_ppf(p)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def _check_mode(mode: str) -> None:
    if mode not in SCALING_MODES:
        raise UsageError(f"unknown scaling mode {mode!r}; expected one of {', '.join(SCALING_MODES)}")


def _interval(estimate: float, half_width: float, alpha: float, *, nonnegative: bool, **tags) -> ConfidenceInterval:
    lower = estimate - half_width
    upper = estimate + half_width
    warnings = (NEGATIVE_LOWER,) if nonnegative and lower < 0 else ()
    return ConfidenceInterval(
        estimate=estimate, lower=lower, upper=upper, level=1.0 - alpha, warnings=warnings, **tags
    )


def _method(*views: TrimmedView) -> str:
    return "fep" if all(v.is_untrimmed for v in views) else "tfep"


def _tau_of(view: TrimmedView) -> float | None:
    return view.tau


# -- one sample ----------------------------------------------------------------


def _mean_ci(s: MomentSummary, alpha: float, **tags) -> ConfidenceInterval:
    if s.variance_degenerate:
        raise DegenerateError("trimmed variance is zero; the mean interval is degenerate")
    half = z_quantile(1.0 - alpha / 2.0) * math.sqrt(s.variance) / math.sqrt(s.n_tau)
    return _interval(s.mean, half, alpha, nonnegative=False, target="mean", n_tau=s.n_tau, **tags)


def _variance_ci(s: MomentSummary, alpha: float, **tags) -> ConfidenceInterval:
    if s.n_tau < 3 or s.t_squared_degenerate:
        raise DegenerateError(
            f"T^2 = {s.t_squared:.6g} is not positive with n_tau = {s.n_tau}; "
            "retain more observations (larger n or smaller tau)"
        )
    half = z_quantile(1.0 - alpha / 2.0) * math.sqrt(s.t_squared) / math.sqrt(s.n_tau)
    return _interval(s.variance, half, alpha, nonnegative=True, target="variance", n_tau=s.n_tau, **tags)


def one_sample_mean_ci(view: TrimmedView, alpha: float = 0.05) -> ConfidenceInterval:
    """``mean +/- z_{1-alpha/2} * S / sqrt(n_tau)`` for the trimmed mean.

    Raises:
        DegenerateError: the retained values are all equal.
    """
    alpha = _check_alpha(alpha)
    return _mean_ci(summarize(view), alpha, method=_method(view), tau=_tau_of(view))


def one_sample_variance_ci(view: TrimmedView, alpha: float = 0.05) -> ConfidenceInterval:
    """``S^2 +/- z_{1-alpha/2} * T / sqrt(n_tau)`` for the trimmed variance."""
    alpha = _check_alpha(alpha)
    return _variance_ci(summarize(view), alpha, method=_method(view), tau=_tau_of(view))


# -- two samples ---------------------------------------------------------------


def _scalings(s1: MomentSummary, s2: MomentSummary, mode: str) -> TwoSampleScaling:
    _check_mode(mode)
    if s1.variance_degenerate or s2.variance_degenerate:
        raise DegenerateError("a trimmed variance is zero; two-sample scalings are undefined")
    n1, n2 = s1.n_tau, s2.n_tau
    v1, v2 = s1.variance, s2.variance
    if mode == "delta-corrected":
        t1 = (s1.m4 - v1 * v1) / (v2 * v2)
        t2 = v1 * v1 * (s2.m4 - v2 * v2) / (v2 * v2 * v2 * v2)
    else:
        t1 = s1.m4 - v1 * v1
        t2 = s2.m4 - v2 * v2
    if not (t1 > 0.0 and t2 > 0.0):
        raise DegenerateError(
            f"non-positive plug-in variance (t1_sq={t1:.6g}, t2_sq={t2:.6g}); retain more observations"
        )
    a_hat = math.sqrt(n1 * n2 / (n1 * t2 + n2 * t1))
    b_hat = math.sqrt(n1 * n2 / (n1 * v2 + n2 * v1))
    return TwoSampleScaling(a_hat=a_hat, b_hat=b_hat, t1_sq=t1, t2_sq=t2, mode=mode)  # type: ignore[arg-type]


def two_sample_scalings(
    view1: TrimmedView, view2: TrimmedView, mode: ScalingMode = "delta-corrected"
) -> TwoSampleScaling:
    """Plug-in scale factors for the variance ratio (``a_hat``) and mean difference (``b_hat``).

    ``delta-corrected`` normalises the per-sample fourth-moment terms by the
    second sample's variance as the delta method for ``u / v`` requires;
    ``paper-literal`` uses the raw ``m4 - S^4`` of each sample.

    Raises:
        DegenerateError: a zero variance or non-positive plug-in term.
    """
    return _scalings(summarize(view1), summarize(view2), mode)


def _mean_diff_ci(s1: MomentSummary, s2: MomentSummary, alpha: float, **tags) -> ConfidenceInterval:
    if s1.variance_degenerate or s2.variance_degenerate:
        raise DegenerateError("a trimmed variance is zero; the mean-difference interval is degenerate")
    n1, n2 = s1.n_tau, s2.n_tau
    b_hat = math.sqrt(n1 * n2 / (n1 * s2.variance + n2 * s1.variance))
    half = z_quantile(1.0 - alpha / 2.0) / b_hat
    return _interval(
        s1.mean - s2.mean, half, alpha, nonnegative=False, target="mean-difference", n1_tau=n1, n2_tau=n2, **tags
    )


def _ratio_ci(s1: MomentSummary, s2: MomentSummary, alpha: float, mode: str, **tags) -> ConfidenceInterval:
    if s2.variance_degenerate:
        raise DegenerateError("second-sample trimmed variance is zero; the variance ratio is undefined")
    sc = _scalings(s1, s2, mode)
    half = z_quantile(1.0 - alpha / 2.0) / sc.a_hat
    return _interval(
        s1.variance / s2.variance,
        half,
        alpha,
        nonnegative=True,
        target="variance-ratio",
        scaling_mode=mode,
        n1_tau=s1.n_tau,
        n2_tau=s2.n_tau,
        **tags,
    )


def two_sample_mean_diff_ci(view1: TrimmedView, view2: TrimmedView, alpha: float = 0.05) -> ConfidenceInterval:
    """``(mean1 - mean2) +/- z / b_hat``."""
    alpha = _check_alpha(alpha)
    return _mean_diff_ci(
        summarize(view1), summarize(view2), alpha, method=_method(view1, view2), tau=_pair_tau(view1, view2)
    )


def two_sample_variance_ratio_ci(
    view1: TrimmedView,
    view2: TrimmedView,
    alpha: float = 0.05,
    mode: ScalingMode = "delta-corrected",
) -> ConfidenceInterval:
    """``S1^2 / S2^2 +/- z / a_hat`` with ``a_hat`` from the selected scaling mode."""
    alpha = _check_alpha(alpha)
    _check_mode(mode)
    return _ratio_ci(
        summarize(view1), summarize(view2), alpha, mode, method=_method(view1, view2), tau=_pair_tau(view1, view2)
    )


def _pair_tau(view1: TrimmedView, view2: TrimmedView) -> float | None:
    t1, t2 = _tau_of(view1), _tau_of(view2)
    return t1 if t1 == t2 else None


# -- classical FEP on raw samples ------------------------------------------------


def fep_mean_ci(values, alpha: float = 0.05) -> ConfidenceInterval:
    """Classical FEP interval for the mean, computed on the raw (unsorted) sample."""
    return _mean_ci(classical_statistics(values), _check_alpha(alpha), method="fep", tau=0.0)


def fep_variance_ci(values, alpha: float = 0.05) -> ConfidenceInterval:
    return _variance_ci(classical_statistics(values), _check_alpha(alpha), method="fep", tau=0.0)


def fep_mean_diff_ci(values1, values2, alpha: float = 0.05) -> ConfidenceInterval:
    return _mean_diff_ci(
        classical_statistics(values1), classical_statistics(values2), _check_alpha(alpha), method="fep", tau=0.0
    )


def fep_variance_ratio_ci(
    values1, values2, alpha: float = 0.05, mode: ScalingMode = "delta-corrected"
) -> ConfidenceInterval:
    _check_mode(mode)
    return _ratio_ci(
        classical_statistics(values1),
        classical_statistics(values2),
        _check_alpha(alpha),
        mode,
        method="fep",
        tau=0.0,
    )
