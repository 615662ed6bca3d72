import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate
from scipy import stats

from tfep.distributions import (
    DistributionSpec,
    Seed,
    closed_form_trimmed_moments,
    parse_spec,
    population_trimmed_moments,
    quantile,
    sample,
)
from tfep.errors import DistributionError, DomainError, InfiniteMomentError

SPECS = [
    DistributionSpec.normal(3, 2),
    DistributionSpec.student(1, 5),
    DistributionSpec.student(2.5),
    DistributionSpec.pareto(1, 1.5),
    DistributionSpec.lognormal(0, 1),
    DistributionSpec.cauchy(0, 1),
]

SCIPY = {
    "normal:3,2": stats.norm(3, 2),
    "student:1+5": stats.t(1, loc=5),
    "student:2.5+0": stats.t(2.5),
    "pareto:1,1.5": stats.pareto(1.5, scale=1),
    "lognormal:0,1": stats.lognorm(1.0, scale=1.0),
    "cauchy:0,1": stats.cauchy(0, 1),
}


def scipy_trimmed(spec, tau):
    """Reference trimmed moments by scipy quadrature of the quantile function."""
    dist = SCIPY[str(spec)]
    lo, hi = tau, 1 - tau
    mass = hi - lo
    opts = dict(limit=500, epsabs=1e-11, epsrel=1e-11, points=[0.5])
    mu = sp_integrate.quad(dist.ppf, lo, hi, **opts)[0] / mass
    var = sp_integrate.quad(lambda u: (dist.ppf(u) - mu) ** 2, lo, hi, **opts)[0] / mass
    return mu, var


# -- construction and text form -------------------------------------------------------


@pytest.mark.parametrize(
    "text, family, params",
    [
        ("normal:3,2", "normal", (3.0, 2.0)),
        ("pareto:1,1.5", "pareto", (1.0, 1.5)),
        ("student:2+5", "student", (2.0, 5.0)),
        ("student:1", "student", (1.0, 0.0)),
        ("student:3-1.5", "student", (3.0, -1.5)),
        ("lognormal:0,1", "lognormal", (0.0, 1.0)),
        ("cauchy:0,1", "cauchy", (0.0, 1.0)),
        ("Normal: 3, 2", "normal", (3.0, 2.0)),
    ],
)
def test_parse_spec(text, family, params):
    spec = parse_spec(text)
    assert (spec.family, spec.params) == (family, params)
    assert parse_spec(str(spec)) == spec


@pytest.mark.parametrize(
    "text",
    ["gamma:1,2", "normal", "normal:3", "normal:3,-2", "normal:a,b", "pareto:0,1", "student:-1", "student:2*5"],
)
def test_parse_spec_rejects(text):
    with pytest.raises(DistributionError):
        parse_spec(text)


def test_canonical_and_label_forms():
    assert str(DistributionSpec.student(2, 5)) == "student:2+5"
    assert DistributionSpec.student(1, 5).label == "5+Student(df=1)"
    assert DistributionSpec.pareto(1, 1.5).label == "Pareto(1,1.5)"


@pytest.mark.parametrize("family, params", [("normal", (0, 0)), ("lognormal", (0, -1)), ("cauchy", (0, 0))])
def test_invalid_parameters(family, params):
    with pytest.raises(DistributionError):
        DistributionSpec(family, params)


# -- quantiles ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, p, expected",
    [
        (DistributionSpec.pareto(1, 1.5), 0.5, 0.5 ** (-2 / 3)),
        (DistributionSpec.normal(0, 1), 0.5, 0.0),
        (DistributionSpec.lognormal(0, 1), 0.5, 1.0),
        (DistributionSpec.cauchy(2, 3), 0.75, 5.0),
    ],
)
def test_quantile_examples(spec, p, expected):
    assert quantile(spec, p) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_quantile_roundtrip_and_monotone(spec):
    grid = np.linspace(0.001, 0.999, 999)
    xs = [spec.quantile(p) for p in grid]
    assert all(b > a for a, b in zip(xs, xs[1:]))
    assert max(abs(spec.cdf(x) - p) for x, p in zip(xs, grid)) <= 1e-10


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_isf_is_consistent_with_quantile(spec):
    for q in (1e-10, 1e-4, 0.05, 0.3):
        x = spec.isf(q)
        assert spec.sf(x) == pytest.approx(q, rel=1e-9)
        assert x == pytest.approx(spec.quantile(1 - q), rel=1e-6)


@pytest.mark.parametrize("p", [0.0, 1.0, -1.0, 2.0])
def test_quantile_domain(p):
    with pytest.raises(DomainError):
        quantile(DistributionSpec.normal(), p)


# -- sampling -------------------------------------------------------------------------


def test_seed_validation():
    with pytest.raises(DomainError):
        Seed(-1)
    with pytest.raises(DomainError):
        Seed(0, 2**64)


def test_sampling_is_deterministic_and_stream_separated():
    spec = DistributionSpec.student(3, 1)
    a = sample(spec, 500, Seed(11, 4))
    assert np.array_equal(a, sample(spec, 500, Seed(11, 4)))
    assert not np.array_equal(a, sample(spec, 500, Seed(11, 5)))
    assert not np.array_equal(a, sample(spec, 500, Seed(11, 4, 1)))
    assert not np.array_equal(a, sample(spec, 500, Seed(12, 4)))


def test_pareto_support():
    x = sample(DistributionSpec.pareto(1, 1.5), 100_000, Seed(3))
    assert x.min() >= 1.0
    assert np.all(np.isfinite(x))


def test_normal_sample_mean():
    x = sample(DistributionSpec.normal(3, 2), 1_000_000, Seed(1))
    assert abs(x.mean() - 3) < 0.01


def test_shifted_cauchy_median():
    x = sample(DistributionSpec.student(1, 5), 1_000_000, Seed(2))
    assert abs(np.median(x) - 5) < 0.05


def test_tiny_df_student_stays_finite():
    x = sample(DistributionSpec.student(0.05), 20_000, Seed(9))
    assert np.all(np.isfinite(x))


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_sampler_matches_cdf(spec):
    n = 100_000
    x = np.sort(sample(spec, n, Seed(2024, 1)))
    cdf = np.array([spec.cdf(v) for v in x])
    ecdf_hi = np.arange(1, n + 1) / n
    ks = max(np.max(ecdf_hi - cdf), np.max(cdf - (ecdf_hi - 1 / n)))
    assert ks < 1.63 / math.sqrt(n) * 1.5


def test_sample_size_validation():
    with pytest.raises(DomainError):
        sample(DistributionSpec.normal(), 0, Seed(0))


# -- population trimmed moments ---------------------------------------------------------


def test_normal_trimmed_variance_closed_form():
    spec = DistributionSpec.normal(3, 2)
    m = population_trimmed_moments(spec, 0.10)
    mu, var = closed_form_trimmed_moments(spec, 0.10)
    assert m.mu_tau == pytest.approx(3.0, abs=1e-10)
    assert m.sigma2_tau == pytest.approx(var, abs=1e-6)
    assert m.sigma2_tau == pytest.approx(1.7506, abs=1e-3)


@pytest.mark.parametrize("tau, expected", [(0.05, 2.049), (0.10, 1.880), (0.20, 1.718)])
def test_pareto_trimmed_mean_closed_form(tau, expected):
    spec = DistributionSpec.pareto(1, 1.5)
    m = population_trimmed_moments(spec, tau)
    mu, var = closed_form_trimmed_moments(spec, tau)
    assert m.mu_tau == pytest.approx(mu, abs=1e-6)
    assert m.sigma2_tau == pytest.approx(var, abs=1e-6)
    assert m.mu_tau == pytest.approx(expected, abs=1e-3)


def test_pareto_antiderivative_by_hand():
    # int (1-u)^(-2/3) du = -3 (1-u)^(1/3)
    mu = 3 * (0.9 ** (1 / 3) - 0.1 ** (1 / 3)) / 0.8
    assert population_trimmed_moments(DistributionSpec.pareto(1, 1.5), 0.10).mu_tau == pytest.approx(mu, abs=1e-9)


@pytest.mark.parametrize("spec", SPECS, ids=str)
@pytest.mark.parametrize("tau", [0.05, 0.10, 0.20])
def test_trimmed_moments_match_scipy(spec, tau):
    m = population_trimmed_moments(spec, tau)
    mu, var = scipy_trimmed(spec, tau)
    assert m.mu_tau == pytest.approx(mu, abs=1e-7, rel=1e-8)
    assert m.sigma2_tau == pytest.approx(var, abs=1e-7, rel=1e-8)
    assert m.mu4_tau >= m.sigma2_tau**2


@pytest.mark.parametrize(
    "spec, mean, var, mu4",
    [
        (DistributionSpec.normal(3, 2), 3.0, 4.0, 48.0),
        (DistributionSpec.student(5), 0.0, 5 / 3, 25.0),
        (DistributionSpec.pareto(1, 5), 1.25, 5 / 48, None),
        (DistributionSpec.lognormal(0, 0.5), math.exp(0.125), (math.exp(0.25) - 1) * math.exp(0.25), None),
    ],
)
def test_untrimmed_moments(spec, mean, var, mu4):
    m = population_trimmed_moments(spec, 0.0)
    assert m.mu_tau == pytest.approx(mean, rel=1e-8, abs=1e-10)
    assert m.sigma2_tau == pytest.approx(var, rel=1e-8)
    if mu4 is not None:
        assert m.mu4_tau == pytest.approx(mu4, rel=1e-7)


@pytest.mark.parametrize(
    "spec", [DistributionSpec.cauchy(), DistributionSpec.student(1, 5), DistributionSpec.pareto(1, 1.5)], ids=str
)
def test_untrimmed_moments_must_exist(spec):
    with pytest.raises(InfiniteMomentError):
        population_trimmed_moments(spec, 0.0)


def test_normal_trimmed_variance_decreases_in_tau():
    spec = DistributionSpec.normal(3, 2)
    values = [population_trimmed_moments(spec, t).sigma2_tau for t in (0.0, 0.05, 0.10, 0.20)]
    assert all(b < a for a, b in zip(values, values[1:]))


@settings(max_examples=25, deadline=None)
@given(
    mu=st.floats(-50, 50),
    sigma=st.floats(0.1, 20),
    tau=st.sampled_from([0.0, 0.05, 0.1, 0.2, 0.3]),
)
def test_normal_oracle_location_scale_equivariance(mu, sigma, tau):
    std = population_trimmed_moments(DistributionSpec.normal(0, 1), tau)
    m = population_trimmed_moments(DistributionSpec.normal(mu, sigma), tau)
    assert m.mu_tau == pytest.approx(mu + sigma * std.mu_tau, abs=1e-7 * max(1, abs(mu), sigma))
    assert m.sigma2_tau == pytest.approx(sigma**2 * std.sigma2_tau, rel=1e-9)
    assert m.mu4_tau == pytest.approx(sigma**4 * std.mu4_tau, rel=1e-8)


@pytest.mark.parametrize("tau", [-0.1, 0.5, 0.7])
def test_trimmed_moments_domain(tau):
    with pytest.raises(DomainError):
        population_trimmed_moments(DistributionSpec.normal(), tau)
