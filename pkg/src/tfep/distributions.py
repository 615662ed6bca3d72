"""Distribution families, seeded sampling, and population trimmed moments.

Five families are supported: Normal, shifted Student-t, Pareto (type I),
Lognormal and Cauchy. Each :class:`DistributionSpec` owns its CDF, quantile
function and sampler. :func:`population_trimmed_moments` integrates the
quantile function over the central window ``[tau, 1 - tau]``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import special
from .errors import DistributionError, DomainError, InfiniteMomentError
from .quadrature import integrate

Family = Literal["normal", "student", "pareto", "lognormal", "cauchy"]

FAMILIES: tuple[str, ...] = ("normal", "student", "pareto", "lognormal", "cauchy")

_PARAM_NAMES = {
    "normal": ("mu", "sigma"),
    "student": ("df", "shift"),
    "pareto": ("xm", "alpha"),
    "lognormal": ("mu", "sigma"),
    "cauchy": ("location", "scale"),
}
# index of parameters that must be strictly positive
_POSITIVE = {"normal": (1,), "student": (0,), "pareto": (0, 1), "lognormal": (1,), "cauchy": (1,)}

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class Seed:
    """Coordinates of one reproducible random stream.

    ``master`` identifies the study, ``stream`` the replication. ``lane``
    separates independent draws inside one replication (sample 1 and
    sample 2 of a two-sample experiment).
    """

    master: int
    stream: int = 0
    lane: int = 0

    def __post_init__(self):
        for name in ("master", "stream", "lane"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value <= _U64:
                raise DomainError(f"seed {name} must be an unsigned 64-bit integer, got {value!r}")

    def generator(self) -> np.random.Generator:
        # Philox is counter based; the key is fixed by (master, stream, lane) alone
        seq = np.random.SeedSequence(entropy=int(self.master), spawn_key=(int(self.stream), int(self.lane)))
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class PopulationTrimmedMoments:
    mu_tau: float
    sigma2_tau: float
    mu4_tau: float
    tau: float


@dataclass(frozen=True)
class DistributionSpec:
    family: Family
    params: tuple[float, float]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DistributionError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        params = tuple(float(p) for p in self.params)
        if len(params) != 2:
            raise DistributionError(f"{self.family} takes 2 parameters, got {len(params)}")
        if not all(math.isfinite(p) for p in params):
            raise DistributionError(f"{self.family} parameters must be finite, got {params}")
        for idx in _POSITIVE[self.family]:
            if params[idx] <= 0:
                name = _PARAM_NAMES[self.family][idx]
                raise DistributionError(f"{self.family} parameter {name} must be > 0, got {params[idx]}")
        object.__setattr__(self, "params", params)

    # -- constructors -------------------------------------------------------

    @classmethod
    def normal(cls, mu: float = 0.0, sigma: float = 1.0) -> DistributionSpec:
        return cls("normal", (mu, sigma))

    @classmethod
    def student(cls, df: float, shift: float = 0.0) -> DistributionSpec:
        return cls("student", (df, shift))

    @classmethod
    def pareto(cls, xm: float, alpha: float) -> DistributionSpec:
        return cls("pareto", (xm, alpha))

    @classmethod
    def lognormal(cls, mu: float = 0.0, sigma: float = 1.0) -> DistributionSpec:
        return cls("lognormal", (mu, sigma))

    @classmethod
    def cauchy(cls, location: float = 0.0, scale: float = 1.0) -> DistributionSpec:
        return cls("cauchy", (location, scale))

    # -- text form ----------------------------------------------------------

    def __str__(self) -> str:
        a, b = (_fmt(p) for p in self.params)
        if self.family == "student":
            sign = "-" if self.params[1] < 0 else "+"
            return f"student:{a}{sign}{_fmt(abs(self.params[1]))}"
        return f"{self.family}:{a},{b}"

    @property
    def label(self) -> str:
        """Short human-readable name for report headers."""
        a, b = (_fmt(p) for p in self.params)
        if self.family == "student":
            shift = self.params[1]
            base = f"Student(df={a})"
            return base if shift == 0 else f"{b}+{base}"
        return f"{self.family.capitalize()}({a},{b})"

    # -- distribution functions ----------------------------------------------

    def cdf(self, x: float) -> float:
        a, b = self.params
        x = float(x)
        if self.family == "normal":
            return special.normal_cdf((x - a) / b)
        if self.family == "student":
            return special.student_cdf(x - b, a)
        if self.family == "pareto":
            return 0.0 if x <= a else -math.expm1(-b * math.log(x / a))
        if self.family == "lognormal":
            return 0.0 if x <= 0 else special.normal_cdf((math.log(x) - a) / b)
        return 0.5 + math.atan((x - a) / b) / math.pi

    def sf(self, x: float) -> float:
        """Survival function ``1 - F(x)``, accurate in the upper tail."""
        a, b = self.params
        x = float(x)
        if self.family == "normal":
            return special.normal_sf((x - a) / b)
        if self.family == "student":
            return special.student_sf(x - b, a)
        if self.family == "pareto":
            return 1.0 if x <= a else (x / a) ** (-b)
        if self.family == "lognormal":
            return 1.0 if x <= 0 else special.normal_sf((math.log(x) - a) / b)
        z = (x - a) / b
        return math.atan2(1.0, z) / math.pi

    def quantile(self, p: float) -> float:
        """Inverse CDF at ``p`` in the open unit interval."""
        p = float(p)
        if not 0.0 < p < 1.0:
            raise DomainError(f"quantile level must lie in (0, 1), got {p!r}")
        a, b = self.params
        if self.family == "normal":
            return a + b * special.normal_ppf(p)
        if self.family == "student":
            return b + special.student_ppf(p, a)
        if self.family == "pareto":
            return a * math.exp(-math.log1p(-p) / b)
        if self.family == "lognormal":
            return math.exp(a + b * special.normal_ppf(p))
        return a + b * math.tan(math.pi * (p - 0.5))

    def isf(self, q: float) -> float:
        """Upper-tail quantile: ``x`` with ``1 - F(x) = q``, exact for tiny ``q``."""
        q = float(q)
        if not 0.0 < q < 1.0:
            raise DomainError(f"tail probability must lie in (0, 1), got {q!r}")
        a, b = self.params
        if self.family == "normal":
            return a + b * special.normal_isf(q)
        if self.family == "student":
            return b + special.student_isf(q, a)
        if self.family == "pareto":
            return a * q ** (-1.0 / b)
        if self.family == "lognormal":
            return math.exp(a + b * special.normal_isf(q))
        return a + b / math.tan(math.pi * q)

    def moment_exists(self, order: int) -> bool:
        """Whether ``E|X|^order`` is finite."""
        if self.family in ("normal", "lognormal"):
            return True
        if self.family == "cauchy":
            return False
        if self.family == "student":
            return self.params[0] > order
        return self.params[1] > order

    # -- sampling -------------------------------------------------------------

    def sample(self, n: int, seed: Seed) -> np.ndarray:
        return sample(self, n, seed)


def _fmt(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(x)


_UNSIGNED = r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_STUDENT_RE = re.compile(rf"^\s*({_UNSIGNED})\s*(?:([-+])\s*({_UNSIGNED}))?\s*$")


def parse_spec(text: str) -> DistributionSpec:
    """Parse the canonical text form, e.g. ``normal:3,2`` or ``student:2+5``."""
    family, sep, body = text.strip().partition(":")
    family = family.strip().lower()
    if not sep:
        raise DistributionError(f"distribution {text!r} is not of the form family:params")
    if family not in FAMILIES:
        raise DistributionError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    if family == "student":
        m = _STUDENT_RE.match(body)
        if not m:
            raise DistributionError(f"cannot parse student parameters {body!r}; expected df or df+shift")
        df = float(m.group(1))
        shift = 0.0 if m.group(2) is None else float(m.group(2) + m.group(3))
        return DistributionSpec("student", (df, shift))
    parts = body.split(",")
    if len(parts) != 2:
        raise DistributionError(f"{family} expects two comma-separated parameters, got {body!r}")
    try:
        params = tuple(float(p) for p in parts)
    except ValueError:
        raise DistributionError(f"non-numeric parameter in {text!r}") from None
    return DistributionSpec(family, params)  # type: ignore[arg-type]


def sample(spec: DistributionSpec, n: int, seed: Seed) -> np.ndarray:
    """Draw ``n`` i.i.d. values from ``spec`` on the stream ``seed``.

    Pareto and Cauchy use inversion of uniforms, the Normal uses numpy's
    ziggurat sampler, Lognormal exponentiates a Normal, and Student-t is a
    Normal divided by ``sqrt(chi2 / df)``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    n = int(n)
    rng = seed.generator()
    out = _draw(spec, rng, n)
    bad = ~np.isfinite(out)
    while bad.any():
        # chi-square underflow for tiny df; redraw from the same stream
        out[bad] = _draw(spec, rng, int(bad.sum()))
        bad = ~np.isfinite(out)
    return out


def _draw(spec: DistributionSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    a, b = spec.params
    if spec.family == "normal":
        return a + b * rng.standard_normal(n)
    if spec.family == "lognormal":
        return np.exp(a + b * rng.standard_normal(n))
    if spec.family == "student":
        z = rng.standard_normal(n)
        chi2 = 2.0 * rng.standard_gamma(0.5 * a, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            return b + z / np.sqrt(chi2 / a)
    if spec.family == "pareto":
        # 1 - U lies in (0, 1], so the support bound xm is attainable but never crossed
        u = 1.0 - rng.random(n)
        return a * np.exp(-np.log(u) / b)
    u = rng.random(n)
    return a + b * np.tan(np.pi * (u - 0.5))


def quantile(spec: DistributionSpec, p: float) -> float:
    return spec.quantile(p)


# -- population trimmed moments ----------------------------------------------


def _half_integral(tail_quantile, g, tau: float, *, epsabs: float, epsrel: float) -> float:
    """Integrate ``g(Q(v))`` for ``v`` in ``[tau, 1/2]`` where ``Q`` is a tail quantile.

    Substituting ``v = exp(-s)`` spreads quadrature nodes logarithmically
    toward the tail; for ``tau = 0`` the infinite ``s`` range is mapped onto
    ``[0, 1)`` via ``s = ln 2 + t / (1 - t)``.
    """
    s0 = math.log(2.0)

    def in_s(s: np.ndarray) -> np.ndarray:
        v = np.exp(-s)
        out = np.zeros_like(s)
        live = v > 0
        x = np.array([tail_quantile(vi) for vi in v[live]])
        out[live] = g(x) * v[live]
        return out

    if tau > 0:
        return integrate(in_s, s0, -math.log(tau), epsabs=epsabs, epsrel=epsrel).value

    def in_t(t: np.ndarray) -> np.ndarray:
        one_minus = 1.0 - t
        return in_s(s0 + t / one_minus) / (one_minus * one_minus)

    return integrate(in_t, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel).value


def population_trimmed_moments(
    spec: DistributionSpec,
    tau: float,
    *,
    epsabs: float = 1e-8,
    epsrel: float = 1e-12,
) -> PopulationTrimmedMoments:
    """Mean, variance and fourth central moment of the law restricted to ``[F^-1(tau), F^-1(1-tau)]``.

    Each moment is ``(1 - 2 tau)^-1`` times the integral of a power of the
    centred quantile function over ``[tau, 1 - tau]``. The window is split at
    the median and each half is integrated in its own tail variable.

    Raises:
        DomainError: ``tau`` outside ``[0, 0.5)``.
        InfiniteMomentError: ``tau = 0`` and the fourth moment does not exist.
        QuadratureError: the integrals fail to converge.
    """
    tau = float(tau)
    if not 0.0 <= tau < 0.5:
        raise DomainError(f"trimming proportion must lie in [0, 0.5), got {tau!r}")
    if tau == 0.0:
        for order in (1, 2, 4):
            if not spec.moment_exists(order):
                raise InfiniteMomentError(
                    f"{spec} has no finite moment of order {order}; use tau > 0"
                )
    mass = 1.0 - 2.0 * tau

    def lower(v: float) -> float:
        return spec.quantile(v)

    def upper(v: float) -> float:
        return spec.isf(v)

    def moment(g) -> float:
        total = _half_integral(lower, g, tau, epsabs=epsabs, epsrel=epsrel) + _half_integral(
            upper, g, tau, epsabs=epsabs, epsrel=epsrel
        )
        return total / mass

    mu = moment(lambda x: x)
    var = moment(lambda x: (x - mu) ** 2)
    mu4 = moment(lambda x: (x - mu) ** 4)
    return PopulationTrimmedMoments(mu_tau=mu, sigma2_tau=var, mu4_tau=mu4, tau=tau)


def closed_form_trimmed_moments(spec: DistributionSpec, tau: float) -> tuple[float, float]:
    """Closed-form ``(mu_tau, sigma2_tau)`` for the Normal and Pareto families.

    Used to cross-check the quadrature path.
    """
    tau = float(tau)
    mass = 1.0 - 2.0 * tau
    a, b = spec.params
    if spec.family == "normal":
        if tau == 0.0:
            return a, b * b
        z = special.normal_isf(tau)
        return a, b * b * (mass - 2.0 * z * special.normal_pdf(z)) / mass
    if spec.family == "pareto":
        xm, alpha = a, b

        def power_integral(k: int) -> float:
            # int_tau^{1-tau} v^{-k/alpha} dv
            e = 1.0 - k / alpha
            if tau == 0.0:
                if e <= 0:
                    raise InfiniteMomentError(f"{spec} has no finite moment of order {k}")
                return 1.0 / e
            if e == 0.0:
                return math.log((1.0 - tau) / tau)
            return ((1.0 - tau) ** e - tau**e) / e

        m1 = xm * power_integral(1) / mass
        m2 = xm * xm * power_integral(2) / mass
        return m1, m2 - m1 * m1
    raise DistributionError(f"no closed form available for {spec.family}")
