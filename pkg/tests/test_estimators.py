import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfep.distributions import DistributionSpec, Seed, sample
from tfep.errors import DataError, DegenerateError, DomainError
from tfep.estimators import (
    DiagnosticsReport,
    central_moment,
    classical_statistics,
    diagnostics,
    jarque_bera_p_value,
    summarize,
    t_squared,
    trimmed_mean,
    trimmed_variance,
)
from tfep.trimming import TrimSpec, sort_and_trim

finite = st.floats(-1e4, 1e4, allow_nan=False)
samples = st.lists(finite, min_size=3, max_size=40)


def view(values, tau=0.0):
    return sort_and_trim(values, TrimSpec.symmetric(tau))


def naive(values, tau):
    """Reference: sort, slice, and sum in plain Python."""
    xs = sorted(values)
    k = int(math.floor(tau * len(xs)))
    kept = xs[k : len(xs) - k]
    m = len(kept)
    mean = sum(kept) / m
    dev = [x - mean for x in kept]
    var = sum(d * d for d in dev) / (m - 1)
    m4 = sum(d**4 for d in dev) / m
    return mean, var, m4, m4 - var * var


def test_hand_examples():
    v = view([2, 3, 4])
    assert trimmed_mean(v) == 3
    assert trimmed_variance(v) == 1
    assert central_moment(v, 3) == 0
    assert central_moment(view([-1, 1]), 2) == 1
    assert central_moment(view([-1, 0, 1]), 4) == pytest.approx(2 / 3, abs=1e-15)


def test_constant_data_is_degenerate():
    s = summarize(view([7.0] * 6))
    assert s.variance == 0 and s.variance_degenerate
    assert s.t_squared == 0 and s.t_squared_degenerate


def test_divisor_mismatch_makes_t_squared_negative():
    s = summarize(view([-1, 1, -1, 1]))
    assert s.m4 == 1
    assert s.variance == pytest.approx(4 / 3)
    assert s.t_squared == pytest.approx(1 - 16 / 9)
    assert s.t_squared_degenerate
    assert t_squared(view([-1, 1, -1, 1])) < 0


def test_t_squared_needs_three_points():
    with pytest.raises(DataError):
        t_squared(view([1.0, 2.0]))


def test_unsupported_moment_order():
    with pytest.raises(DomainError):
        central_moment(view([1, 2, 3]), 5)


def test_normal_t_squared():
    x = sample(DistributionSpec.normal(0, 1), 100_000, Seed(5))
    assert abs(summarize(view(x)).t_squared - 2.0) < 0.1


def test_trimmed_mean_on_simulated_samples():
    x = sample(DistributionSpec.normal(3, 2), 10_000, Seed(1))
    assert abs(trimmed_mean(view(x, 0.05)) - 3) < 0.06


def test_pareto_trimmed_mean_is_unbiased():
    # the single-run spread at n = 10000 is about 0.019 (winsorised variance),
    # so check the average of 40 runs against the oracle value 2.0488
    means = [
        trimmed_mean(view(sample(DistributionSpec.pareto(1, 1.5), 10_000, Seed(1, r)), 0.05)) for r in range(40)
    ]
    assert abs(np.mean(means) - 2.0488) < 4 * 0.0193 / math.sqrt(40)
    assert 0.012 < np.std(means) < 0.03


def test_income_scale_precision():
    # naive float accumulation of 1e6^4 would lose the small spread entirely
    x = 1e6 + np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    s = summarize(view(x))
    assert s.variance == 2.5
    assert s.m4 == pytest.approx(6.8, rel=1e-12)


@settings(max_examples=300)
@given(samples, st.sampled_from([0.0, 0.05, 0.1, 0.2, 0.3]))
def test_matches_naive_reference(values, tau):
    n = len(values)
    if n - 2 * int(tau * n) < 2:
        return
    s = summarize(view(values, tau))
    ref = naive(values, tau)
    scale = max(1.0, max(abs(v) for v in values))
    assert s.mean == pytest.approx(ref[0], abs=1e-12 * scale)
    assert s.variance == pytest.approx(ref[1], rel=1e-9, abs=1e-12 * scale**2)
    assert s.m4 == pytest.approx(ref[2], rel=1e-9, abs=1e-12 * scale**4)


@given(samples)
def test_moment_invariants(values):
    s = summarize(view(values))
    assert s.m4 >= s.m2 * s.m2 * (1 - 1e-12)
    assert s.variance == pytest.approx(s.m2 * s.n_tau / (s.n_tau - 1), rel=1e-12, abs=1e-300)


@given(samples, st.sampled_from([-1e3, -2.5, 0.0, 1.0, 7.25, 1e3]))
def test_location_equivariance(values, c):
    a = trimmed_mean(view(values, 0.1))
    b = trimmed_mean(view([v + c for v in values], 0.1))
    assert b == pytest.approx(a + c, abs=1e-12 * max(1.0, abs(a), abs(c), max(map(abs, values))))


@given(samples, st.sampled_from([0.5, 2.0, 4.0, 0.125]))
def test_scale_equivariance(values, c):
    # powers of two scale exactly, so the summary scales exactly too
    a = trimmed_variance(view(values, 0.1))
    b = trimmed_variance(view([v * c for v in values], 0.1))
    assert b == pytest.approx(c * c * a, rel=1e-12, abs=1e-300)


@given(st.lists(finite, min_size=2, max_size=50), st.randoms(use_true_random=False))
def test_tau_zero_equals_classical_bitwise(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert summarize(view(values)) == classical_statistics(shuffled)


# -- diagnostics ---------------------------------------------------------------------------


def test_diagnostics_symmetric_data():
    d = diagnostics([-2, -1, 0, 1, 2, -2, -1, 0, 1, 2])
    assert d.skewness == 0
    assert d.median == 0
    assert d.jb_p_value == pytest.approx(math.exp(-d.jb_statistic / 2))


def test_diagnostics_against_scipy():
    from scipy import stats

    x = sample(DistributionSpec.lognormal(0, 1), 2000, Seed(3))
    d = diagnostics(x)
    assert d.skewness == pytest.approx(stats.skew(x), rel=1e-10)
    assert d.kurtosis == pytest.approx(stats.kurtosis(x, fisher=False), rel=1e-10)
    jb = stats.jarque_bera(x)
    assert d.jb_statistic == pytest.approx(jb.statistic, rel=1e-10)
    assert d.sd == pytest.approx(np.std(x, ddof=1), rel=1e-12)
    assert d.jb_p_value < 1e-6


def test_normal_kurtosis():
    x = sample(DistributionSpec.normal(0, 1), 2000, Seed(8))
    assert abs(diagnostics(x).kurtosis - 3) < 0.3


def test_jb_p_value_is_chi2_2_survival():
    from scipy import stats

    for s in (0.0, 1.0, 5.99, 40.0):
        assert jarque_bera_p_value(s) == pytest.approx(stats.chi2.sf(s, 2), rel=1e-12)


def test_diagnostics_errors():
    with pytest.raises(DataError):
        diagnostics([1, 2, 3])
    with pytest.raises(DegenerateError):
        diagnostics([4.0] * 10)
    with pytest.raises(DataError):
        diagnostics([1, 2, 3, 4, 5, 6, 7, np.nan])


def test_csv_column_order():
    assert DiagnosticsReport.CSV_COLUMNS == ("n", "mean", "median", "sd", "skewness", "kurtosis", "jb_p_value")
