import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from fprf import analytic as an
from fprf import gpp
from fprf.analytic import FieldParams, QuadrantPoint
from fprf.errors import DomainError
from fprf.gpp import GppParams, TwoIndexParams

Q = QuadrantPoint
unit = st.floats(0.3, 1.0)


def ml_mp(a, b, g, x):
    with mpmath.workdps(50):
        return mpmath.nsum(lambda n: mpmath.rf(g, n) * mpmath.mpf(x) ** n
                           / (mpmath.gamma(a * n + b) * mpmath.factorial(n)), [0, mpmath.inf])


def test_gen_field_pmf_poisson_reduction():
    p = GppParams(1, 1, 1.7)
    for k in range(10):
        assert gpp.gen_field_pmf(p, 1.3, k).value == pytest.approx(stats.poisson.pmf(k, 1.7 * 1.3), rel=1e-12)


@given(unit, unit, st.floats(0.1, 2.5))
def test_gen_field_pmf_void_is_mittag_leffler(a, g, meas):
    p = GppParams(a, g, 0.8)
    assert gpp.gen_field_pmf(p, meas, 0).value == pytest.approx(float(ml_mp(a, 1, g, -0.8 * meas ** a)), rel=1e-9)


def test_gen_field_pmf_against_mpmath():
    a, g, lam, meas = 0.7, 0.5, 1.0, 1.0
    x = lam * meas ** a
    for k in (1, 3, 6):
        with mpmath.workdps(50):
            ref = mpmath.rf(g, k) * mpmath.mpf(x) ** k / mpmath.factorial(k) * ml_mp(a, a * k + 1, g + k, -x)
        assert gpp.gen_field_pmf(GppParams(a, g, lam), meas, k).value == pytest.approx(float(ref), rel=1e-9)


@pytest.mark.parametrize("a", [0.5, 0.8, 1.0])
@pytest.mark.parametrize("g", [0.5, 0.8, 1.0])
@pytest.mark.parametrize("x", [0.5, 2.0])
def test_gen_field_pmf_normalization(a, g, x):
    p = GppParams(a, g, x)
    total = math.fsum(gpp.gen_field_pmf(p, 1.0, k).value for k in range(201))
    assert total == pytest.approx(1.0, abs=1e-8)


def test_gen_field_pmf_factorial_moment_reconstruction():
    p, t = GppParams(0.8, 0.6, 1.0), 1.0
    fm = [1.0] + [gpp.gpp_stats(p, t, "factorial_moment", n=n) for n in range(1, 120)]
    for k in range(5):
        terms = [(-1) ** (n - k) * math.comb(n, k) * fm[n] / math.factorial(n) for n in range(k, 120)]
        assert math.fsum(terms) == pytest.approx(gpp.gen_field_pmf(p, t, k).value, abs=1e-8)


def test_gpp_stats_examples():
    p = GppParams(1, 1, 1.5)
    assert gpp.gpp_stats(p, 0.8, "waiting_survival") == pytest.approx(math.exp(-1.2), rel=1e-14)
    q = GppParams(0.6, 1, 1.0)
    # fractional Poisson pmf x^k E^{k+1}_{a, a k + 1}(-x)
    for k in range(4):
        ref = float(ml_mp(0.6, 0.6 * k + 1, k + 1, -1.0))
        assert gpp.gpp_stats(q, 1.0, "pmf", k=k) == pytest.approx(ref, rel=1e-9)


def test_gpp_moments_against_pmf():
    p, t = GppParams(0.8, 0.5, 1.2), 1.0
    q = np.array([gpp.gpp_stats(p, t, "pmf", k=k) for k in range(200)])
    ks = np.arange(200)
    mean = math.fsum(ks * q)
    assert gpp.gpp_stats(p, t, "mean") == pytest.approx(mean, rel=1e-8)
    assert gpp.gpp_stats(p, t, "variance") == pytest.approx(math.fsum(ks ** 2 * q) - mean ** 2, rel=1e-7)
    assert gpp.gpp_stats(p, t, "pgf", z=0.3) == pytest.approx(math.fsum(q * 0.3 ** ks), rel=1e-9)


def test_gpp_pgf_properties():
    p, t = GppParams(0.7, 0.6, 1.0), 1.3
    assert gpp.gpp_stats(p, t, "pgf", z=0.0) == gpp.gpp_stats(p, t, "pmf", k=0)
    vals = [gpp.gpp_stats(p, t, "pgf", z=z) for z in np.linspace(0, 1, 21)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(1.0, abs=1e-15)


def test_memorylessness_only_in_poisson_corner():
    t, s = 1.0, 1.0
    p = GppParams(1, 1, 1.0)
    assert gpp.gpp_stats(p, t, "conditional_survival", s=s) == \
        pytest.approx(gpp.gpp_stats(p, t, "waiting_survival"), abs=1e-12)
    q = GppParams(0.7, 0.7, 1.0)
    gap = gpp.gpp_stats(q, t, "conditional_survival", s=s) - gpp.gpp_stats(q, t, "waiting_survival")
    assert abs(gap) > 1e-3


def test_gpp_order_stats():
    p = GppParams(0.6, 0.8, 1.0)
    assert gpp.gpp_order_stats(p, 2.0, 1.0, "max_cdf") == 1.0
    e = GppParams(1, 1, 1.5)
    assert gpp.gpp_order_stats(e, 2.0, 0.3, "min_tail") == pytest.approx(math.exp(-0.3 * 3), rel=1e-13)
    assert gpp.gpp_order_stats(e, 2.0, 0.3, "max_cdf") == pytest.approx(math.exp(-0.7 * 3), rel=1e-13)
    with pytest.raises(DomainError):
        gpp.gpp_order_stats(p, 2.0, -0.1, "max_cdf")


@given(st.floats(0.4, 1.0), st.floats(0.4, 1.0), st.integers(0, 8))
def test_two_index_reduces_to_field(a1, a2, k):
    at = Q(1, 1)
    p = TwoIndexParams(a1, 1, a2, 1, 0.3)
    if not an.convergence_regime(FieldParams(0.3, a1, a2), at).usable:
        return
    want = an.pmf(FieldParams(0.3, a1, a2), k, at, route="series").value
    assert gpp.two_index_pmf(p, at, k).value == pytest.approx(want, abs=1e-10)


def test_two_index_examples():
    p = TwoIndexParams(0.9, 0.5, 0.9, 0.5, 1.0)
    assert gpp.two_index_pmf(p, Q(0, 2), 0).value == 1.0
    q = np.array([gpp.two_index_pmf(p, Q(1, 1), k).value for k in range(120)])
    assert math.fsum(q) == pytest.approx(1.0, abs=1e-7)
    ks = np.arange(120)
    assert gpp.two_index_moments(p, Q(1, 1), "mean") == pytest.approx(math.fsum(ks * q), rel=1e-7)
    mean = math.fsum(ks * q)
    assert gpp.two_index_moments(p, Q(1, 1), "variance") == \
        pytest.approx(math.fsum(ks ** 2 * q) - mean ** 2, rel=1e-6)
    assert gpp.two_index_moments(p, Q(1, 1), "pgf", z=0.5) == pytest.approx(math.fsum(q * 0.5 ** ks), rel=1e-8)
    assert gpp.two_index_moments(p, Q(1, 1), "pgf", z=1.0) == 1.0


def test_two_index_full_reduction_mean():
    p = TwoIndexParams(1, 1, 1, 1, 2.0)
    assert gpp.two_index_moments(p, Q(1.5, 0.4), "mean") == pytest.approx(1.2, rel=1e-14)


def test_psi_moments():
    assert gpp.psi_moments(1, 1, 2.3) == pytest.approx((2.3, 0.0), abs=1e-14)
    assert gpp.psi_moments(0.5, 1, 1)[0] == pytest.approx(2 / math.sqrt(math.pi), rel=1e-14)


@given(unit, unit, st.floats(0, 4))
def test_psi_variance_non_negative(a, g, t):
    assert gpp.psi_moments(a, g, t)[1] >= -1e-14


def test_params_validation():
    with pytest.raises(DomainError):
        GppParams(0, 0.5, 1)
    with pytest.raises(DomainError):
        GppParams(0.5, 1.5, 1)
    with pytest.raises(DomainError):
        TwoIndexParams(0.5, 0.5, 0.5, 0.5, -1)
