"""Special functions: normal and Student-t distribution kernels.

The normal quantile is Wichura's AS241 (PPND16) rational approximation,
followed by one Halley step against ``math.erfc`` so the result is accurate
to a few ulps over the whole open unit interval.

Student-t probabilities go through the regularized incomplete beta function;
quantiles are found by safeguarded Newton iteration on the log tail.
"""

from __future__ import annotations

import math

from scipy.special import betainc

from .errors import DomainError

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# AS241 PPND16 coefficients, |p - 0.5| <= 0.425
_A = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
_B = (
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
# r = sqrt(-log(min(p, 1-p))) <= 5
_C = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
_D = (
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
# r > 5
_E = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_F = (
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _horner(coeffs: tuple[float, ...], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / _SQRT2)


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x - _LOG_SQRT_2PI)


def _as241(p: float) -> float:
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _horner(_A, r) / _horner(_B, r)
    r = p if q < 0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = _horner(_C, r) / _horner(_D, r)
    else:
        r -= 5.0
        val = _horner(_E, r) / _horner(_F, r)
    return -val if q < 0 else val


def _as241_upper(q: float) -> float:
    """Upper-tail inverse without forming ``1 - q`` (keeps tiny ``q`` exact)."""
    if q > 0.075:
        return _as241(1.0 - q)
    r = math.sqrt(-math.log(q))
    if r <= 5.0:
        r -= 1.6
        return _horner(_C, r) / _horner(_D, r)
    r -= 5.0
    return _horner(_E, r) / _horner(_F, r)


def _halley(x: float, residual: float) -> float:
    # residual = Phi(x) - p expressed on the tail that is not cancelled
    dens = normal_pdf(x)
    if dens == 0.0:
        return x
    u = residual / dens
    return x - u / (1.0 + 0.5 * x * u)


def normal_ppf(p: float) -> float:
    """Standard normal quantile.

    Args:
        p: probability in the open interval (0, 1).

    Returns:
        ``z`` with ``Phi(z) = p``.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    x = _as241(p)
    if p < 0.5:
        return _halley(x, normal_cdf(x) - p)
    # work on the upper tail so the residual does not cancel
    return _halley(x, (1.0 - p) - normal_sf(x)) if p > 0.5 else x


def normal_isf(q: float) -> float:
    """Inverse survival function: ``z`` with ``1 - Phi(z) = q``."""
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {q!r}")
    if q >= 0.5:
        return -normal_ppf(q)
    x = _as241_upper(q)
    return _halley(x, q - normal_sf(x))


# --- Student t -------------------------------------------------------------


def student_sf(t: float, df: float) -> float:
    """Upper tail ``P(T > t)`` of a standard Student-t with ``df`` degrees of freedom."""
    t = float(t)
    if t < 0:
        return 1.0 - student_sf(-t, df)
    t2 = t * t
    if t2 < df:
        # central region: complement of the symmetric mass in (-t, t)
        return 0.5 - 0.5 * float(betainc(0.5, 0.5 * df, t2 / (df + t2)))
    return 0.5 * float(betainc(0.5 * df, 0.5, df / (df + t2)))


def student_cdf(t: float, df: float) -> float:
    if t > 0:
        return 1.0 - student_sf(t, df)
    return student_sf(-t, df)


def _student_logpdf(t: float, df: float) -> float:
    return (
        math.lgamma(0.5 * (df + 1.0))
        - math.lgamma(0.5 * df)
        - 0.5 * math.log(df * math.pi)
        - 0.5 * (df + 1.0) * math.log1p(t * t / df)
    )


def student_isf(q: float, df: float) -> float:
    """``t`` with ``P(T > t) = q`` for ``q`` in (0, 1)."""
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {q!r}")
    if q > 0.5:
        return -student_isf(1.0 - q, df)
    if q == 0.5:
        return 0.0
    if df == 1.0:
        return 1.0 / math.tan(math.pi * q)
    if df == 2.0:
        return (1.0 - 2.0 * q) / math.sqrt(2.0 * q * (1.0 - q))
    return _student_isf_newton(q, df)


def _student_isf_newton(q: float, df: float) -> float:
    # bracket [lo, hi] with sf(lo) >= q > sf(hi); Newton on log sf, bisect when it leaves
    lo, hi = 0.0, 1.0
    while student_sf(hi, df) > q:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            return math.inf
    log_q = math.log(q)
    t = 0.5 * (lo + hi)
    for _ in range(200):
        sf = student_sf(t, df)
        if sf > q:
            lo = t
        else:
            hi = t
        # d/dt log sf = -pdf/sf
        slope = -math.exp(_student_logpdf(t, df)) / sf if sf > 0.0 else 0.0
        if slope == 0.0:
            t_new = 0.5 * (lo + hi)
        else:
            t_new = t - (math.log(sf) - log_q) / slope
            if not lo < t_new < hi:
                t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 4e-16 * max(1.0, abs(t_new)):
            return t_new
        t = t_new
    return t


def student_ppf(p: float, df: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    return student_isf(1.0 - p, df) if p >= 0.5 else -student_isf(p, df)

