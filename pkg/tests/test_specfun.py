import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose
from scipy import integrate, special

from fprf import specfun as sf
from fprf.errors import DivergentSeries, DomainError, PoleError, RangeError
from fprf.specfun import SeriesControl, WrightParams


def ml_mp(a, b, g, x):
    """High-precision reference ``sum (g)_n x^n / (Gamma(a n + b) n!)``."""
    with mpmath.workdps(60):
        return float(mpmath.nsum(lambda n: mpmath.rf(g, n) * mpmath.mpf(x) ** n
                                 / (mpmath.gamma(a * n + b) * mpmath.factorial(n)), [0, mpmath.inf]))


# ---------------------------------------------------------------- Gamma

def test_log_gamma_examples():
    assert sf.log_gamma(1) == (0.0, 1)
    lg, s = sf.log_gamma(0.5)
    assert s == 1 and lg == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-15)
    lg, s = sf.log_gamma(-0.5)
    assert s == -1 and lg == pytest.approx(math.log(2 * math.sqrt(math.pi)), abs=1e-14)


@pytest.mark.parametrize("x", [0, -1, -2, -7])
def test_log_gamma_poles(x):
    with pytest.raises(PoleError):
        sf.log_gamma(x)


@given(st.floats(-20, 20).filter(lambda x: abs(x - round(x)) > 1e-3))
def test_log_gamma_matches_scipy(x):
    lg, s = sf.log_gamma(x)
    assert s == special.gammasgn(x)
    assert lg == pytest.approx(special.gammaln(x), rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------- incomplete beta

def test_inc_beta_examples():
    assert sf.inc_beta(1, 0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)
    assert sf.inc_beta(0.3, 1, 1) == pytest.approx(0.3, rel=1e-14)
    assert sf.reg_inc_beta(1, 0.7, 1.7) == pytest.approx(1.0, abs=1e-15)
    assert sf.reg_inc_beta(0.5, 1, 1) == pytest.approx(0.5, abs=1e-15)
    assert sf.reg_inc_beta(0.25, 2, 2) == pytest.approx(0.15625, abs=1e-15)


@given(st.floats(0.05, 5), st.floats(0.05, 5))
def test_inc_beta_full_is_beta(a, b):
    expected = math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
    assert sf.inc_beta(1.0, a, b) == pytest.approx(expected, rel=1e-12)


@given(st.floats(0.1, 4), st.floats(0.1, 4), st.floats(0.01, 0.98), st.floats(0.001, 0.02))
def test_reg_inc_beta_monotone_bounded(a, b, x, dx):
    lo, hi = sf.reg_inc_beta(x, a, b), sf.reg_inc_beta(x + dx, a, b)
    assert 0 <= lo <= hi <= 1


@pytest.mark.parametrize("args", [(0, 1, 1), (1.2, 1, 1), (0.5, 0, 1), (0.5, 1, -1)])
def test_inc_beta_domain(args):
    with pytest.raises(DomainError):
        sf.inc_beta(*args)


# ---------------------------------------------------------------- Wright functions

def test_gen_wright_examples():
    e = sf.gen_wright(WrightParams(((1, 1),), ((1, 1),)), 1.0)
    assert e.value == pytest.approx(math.e, rel=1e-12)
    assert e.regime == "series"
    v = sf.gen_wright(WrightParams(((1, 1), (1, 1)), ((1, 1), (1, 1))), -0.5)
    assert v.value == pytest.approx(math.exp(-0.5), rel=1e-12)


@given(st.lists(st.tuples(st.floats(0.1, 4), st.floats(0.1, 2)), min_size=0, max_size=3),
       st.lists(st.tuples(st.floats(0.1, 4), st.floats(0.1, 2)), min_size=1, max_size=3))
def test_gen_wright_at_zero_is_gamma_ratio(up, lo):
    p = WrightParams(tuple(up), tuple(lo))
    expected = math.prod(math.gamma(a) for a, _ in up) / math.prod(math.gamma(b) for b, _ in lo)
    rep = sf.gen_wright(p, 0.0)
    assert rep.value == pytest.approx(expected, rel=1e-13)
    assert rep.regime == "closed_form"


def test_gen_wright_divergent_raises():
    # delta = 1 - 3 = -2 < -1: zero radius
    with pytest.raises(DivergentSeries):
        sf.gen_wright(WrightParams(((1, 3),), ((1, 1),)), 0.1)


def test_gen_wright_against_mpmath():
    p = WrightParams(((0.7, 2.0),), ((1.5, 1.0), (1.0, 1.6)))
    x = -2.3
    with mpmath.workdps(50):
        ref = mpmath.nsum(lambda n: mpmath.gamma(0.7 + 2 * n) * mpmath.mpf(x) ** n
                          / (mpmath.gamma(1.5 + n) * mpmath.gamma(1 + 1.6 * n) * mpmath.factorial(n)),
                          [0, mpmath.inf])
    assert sf.gen_wright(p, x).value == pytest.approx(float(ref), rel=1e-11)


def test_wright_w_examples():
    assert sf.wright_w(0, 1, 1).value == pytest.approx(math.e, rel=1e-13)
    assert sf.wright_w(-0.5, 0.5, -1).value == pytest.approx(0.439391, abs=1e-6)
    assert sf.wright_w(-0.5, 0.5, -1).value == pytest.approx(math.exp(-0.25) / math.sqrt(math.pi), rel=1e-12)
    assert sf.wright_w(0.3, 2.5, 0.0).value == pytest.approx(1 / math.gamma(2.5), rel=1e-14)


@given(st.floats(0, 8))
def test_m_wright_half_is_gaussian(x):
    assert sf.m_wright(0.5, x)[0] == pytest.approx(math.exp(-x * x / 4) / math.sqrt(math.pi), abs=1e-12)


@given(st.floats(0, 10))
def test_m_wright_third_is_airy(x):
    expected = 3 ** (2 / 3) * special.airy(x / 3 ** (1 / 3))[0]
    assert sf.m_wright(1 / 3, x)[0] == pytest.approx(expected, abs=1e-11)


@pytest.mark.parametrize("nu", [0.3, 0.6, 0.85])
def test_m_wright_is_a_density(nu):
    val = integrate.quad(lambda y: sf.m_wright(nu, y)[0], 0, np.inf, limit=200)[0]
    assert val == pytest.approx(1.0, abs=1e-8)


# ---------------------------------------------------------------- Mittag-Leffler

def test_mittag_leffler_examples():
    assert sf.mittag_leffler(1, 1, 1, 1).value == pytest.approx(math.e, rel=1e-14)
    assert sf.mittag_leffler(0.7, 1.8, 0.4, 0).value == pytest.approx(1 / math.gamma(1.8), rel=1e-14)
    e_half = sf.mittag_leffler(0.5, 1, 1, -1).value
    assert e_half == pytest.approx(math.e * math.erfc(1), abs=1e-12)
    assert e_half == pytest.approx(0.427584, abs=1e-6)


@given(st.floats(0.3, 1.0), st.floats(0.5, 2.0), st.floats(0.2, 2.0), st.floats(-6, 3))
def test_mittag_leffler_against_mpmath(a, b, g, x):
    v = sf.mittag_leffler(a, b, g, x).value
    assert v == pytest.approx(ml_mp(a, b, g, x), rel=1e-8, abs=1e-11)


@pytest.mark.parametrize("x", [-10.0, -30.0, -50.0])
def test_mittag_leffler_large_negative_argument(x):
    # E_{1/2}(x) = exp(x^2) erfc(-x): scipy's erfcx is the reference
    assert sf.mittag_leffler(0.5, 1, 1, x).value == pytest.approx(special.erfcx(-x), rel=1e-8)


def test_mittag_leffler_complex_matches_exponential():
    z = complex(-0.4, 1.3)
    assert sf.mittag_leffler_complex(1, 1, 1, z).value == pytest.approx(np.exp(z), rel=1e-14)


def test_mittag_leffler_complex_against_mpmath():
    a, b, g, z = 0.8, 1.0, 0.5, complex(-1.2, 0.7)
    with mpmath.workdps(40):
        ref = complex(mpmath.nsum(lambda n: mpmath.rf(g, n) * mpmath.mpc(z) ** n
                                  / (mpmath.gamma(a * n + b) * mpmath.factorial(n)), [0, mpmath.inf]))
    assert abs(sf.mittag_leffler_complex(a, b, g, z).value - ref) < 1e-12


@pytest.mark.parametrize("alpha", [0.5, 0.8])
@pytest.mark.parametrize("k", [1, 2])
def test_mittag_leffler_derivative_identity(alpha, k):
    h = 1e-4
    E = lambda x: sf.mittag_leffler(alpha, 1, 1, x).value
    for x in np.linspace(-2, 2, 7):
        if k == 1:
            num = (E(x + h) - E(x - h)) / (2 * h)
        else:
            num = (E(x + h) - 2 * E(x) + E(x - h)) / h ** 2
        ana = math.factorial(k) * sf.mittag_leffler(alpha, 1 + k * alpha, 1 + k, x).value
        assert abs(num - ana) < 1e-4


def test_mittag_leffler_laplace_pairs():
    ml = sf.mittag_leffler
    f = lambda t: math.exp(-2 * t) * ml(0.7, 1, 2, -t ** 0.7).value
    lap = integrate.quad(f, 0, np.inf, limit=200)[0]
    assert lap == pytest.approx(2 ** (0.7 * 2 - 1) / (2 ** 0.7 + 1) ** 2, abs=1e-6)
    f1 = lambda x: math.exp(-1.5 * x) * ml(0.6, 1, 1, -x ** 0.6).value
    lap1 = integrate.quad(f1, 0, np.inf, limit=200)[0]
    assert lap1 == pytest.approx(1.5 ** -0.4 / (1.5 ** 0.6 + 1), abs=1e-6)


@pytest.mark.parametrize("a,g", [(0.5, 0.5), (0.9, 1.0)])
def test_mittag_leffler_completely_monotone_spot(a, g):
    vals = [sf.mittag_leffler(a, 1, g, -x).value for x in np.linspace(0, 10, 41)]
    assert all(v > 0 for v in vals)
    assert all(b <= a_ + 1e-14 for a_, b in zip(vals, vals[1:]))


def test_ml_count_pmf_matches_series_reference():
    # (g)_k x^k / k! E^{g+k}_{a, a k + 1}(-x)
    a, g, x, k = 0.6, 0.7, 1.4, 3
    ref = math.gamma(g + k) / math.gamma(g) * x ** k / math.factorial(k) * ml_mp(a, a * k + 1, g + k, -x)
    assert sf.ml_count_pmf(a, g, x, k).value == pytest.approx(ref, rel=1e-9)


def test_ml_count_pmf_quadrature_route_far_tail():
    # x large enough that the alternating series loses its digits
    a, g, x = 0.5, 1.0, 30.0
    vals = [sf.ml_count_pmf(a, g, x, k).value for k in range(400)]
    assert math.fsum(vals) == pytest.approx(1.0, abs=1e-7)
    assert min(vals) >= 0


# ---------------------------------------------------------------- Airy, Bessel, Riemann-Liouville

def test_airy_examples():
    assert sf.airy_ai(0.0) == pytest.approx(0.355028, abs=1e-6)
    for x in (-2.0, 0.0, 1.0):
        assert sf.airy_ai(x) == pytest.approx(float(mpmath.airyai(x)), abs=1e-12)
    vals = [sf.airy_ai(x) for x in np.linspace(3, 20, 30)]
    assert all(v > 0 for v in vals) and all(b < a for a, b in zip(vals, vals[1:]))


@given(st.floats(-20, 20))
def test_airy_matches_scipy(x):
    assert sf.airy_ai(x) == pytest.approx(special.airy(x)[0], abs=1e-9)


def test_airy_range():
    with pytest.raises(RangeError):
        sf.airy_ai(20.5)


def test_bessel_examples():
    assert sf.bessel_j(0, 0) == 1.0
    assert sf.bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, abs=1e-14)
    assert sf.bessel_j(1, 0) == 0.0
    with pytest.raises(RangeError):
        sf.bessel_j(0, 61)


@given(st.integers(0, 8), st.floats(0, 60))
def test_bessel_half_orders_against_mpmath(k, x):
    assert sf.bessel_j(k / 2, x) == pytest.approx(float(mpmath.besselj(k / 2, x)), abs=1e-12)


@pytest.mark.parametrize("a,nu", [(1, 0.5), (2, 0.3)])
def test_riemann_liouville_monomial(a, nu):
    t = 1.7
    val = sf.riemann_liouville(lambda s: s ** (a - 1), nu, t)
    assert val == pytest.approx(math.gamma(a) * t ** (a + nu - 1) / math.gamma(a + nu), abs=1e-7)


def test_series_control_validation():
    with pytest.raises(ValueError):
        SeriesControl(abs_tol=0)
    with pytest.raises(ValueError):
        SeriesControl(max_terms=8)


def test_budget_exhausted():
    from fprf.errors import BudgetExhausted
    tight = SeriesControl(abs_tol=1e-300, rel_tol=0, max_terms=16)
    with pytest.raises(BudgetExhausted):
        sf.gen_wright(WrightParams(((1, 1),), ((1, 1),)), 5.0, tight)


def test_pole_terms_vanish():
    # 1/Gamma(b + n beta) at a pole kills the term: W_{-1, 0}(x) has no n = 0 term
    v = sf.wright_w(-0.5, 0.0, -1.0).value
    with mpmath.workdps(30):
        ref = mpmath.nsum(lambda n: (-1) ** n * mpmath.rgamma(-n / 2) / mpmath.factorial(n), [0, mpmath.inf])
    assert v == pytest.approx(float(ref), abs=1e-12)


@pytest.mark.parametrize("a,g,z", [
    (0.5, 0.5, complex(-2, 5.656854249492381)),   # heavy cancellation, off-sheet inversion
    (0.3, 0.7, complex(-3, 4)),
    (0.7, 0.5, complex(-1, 3)),                    # on-sheet: extended-precision series
    (0.9, 0.6, complex(-2, 5)),
    (0.6, 0.5, complex(-4, 6)),
])
def test_mittag_leffler_complex_three_parameter(a, g, z):
    with mpmath.workdps(250):
        ref = complex(mpmath.nsum(lambda n: mpmath.rf(g, n) * mpmath.mpc(z) ** n
                                  / (mpmath.gamma(a * n + 1) * mpmath.factorial(n)),
                                  [0, mpmath.inf], method="direct", steps=[4000]))
    got = sf.mittag_leffler_complex(a, 1, g, z).value
    assert abs(got - ref) <= 1e-9 * abs(ref)


def _wright_direct(beta, b, x, dps=200, terms=1500):
    with mpmath.workdps(dps):
        total, xn, fact, X = mpmath.mpf(0), mpmath.mpf(1), mpmath.mpf(1), mpmath.mpf(x)
        for n in range(terms):
            if n:
                xn *= X
                fact *= n
            total += xn * mpmath.rgamma(mpmath.mpf(beta) * n + b) / fact
        return float(total)


@pytest.mark.parametrize("beta,b,x", [(-0.3, 0.2, -20.0), (-0.5, 0.3, -8.0), (-0.4, 0.9, -10.0),
                                      (0.5, 1.5, -40.0), (-0.6, 0.1, -15.0)])
def test_wright_w_under_cancellation(beta, b, x):
    # double-precision series loses every digit here; the absolute tolerance must still hold
    r = sf.wright_w(beta, b, x)
    assert not r.precision_loss
    assert abs(r.value - _wright_direct(beta, b, x)) < 1e-12
