import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from fprf import analytic as an
from fprf import compound as cp
from fprf import gpp
from fprf import sampling as sm
from fprf.analytic import FieldParams, QuadrantPoint
from fprf.compound import GridDistribution
from fprf.errors import DomainError
from fprf.gpp import GppParams
from fprf.sampling import RngStream

Q = QuadrantPoint
STEP = 2e-3


def exp_cdf(y):
    return 1 - np.exp(-np.asarray(y))


@pytest.fixture(scope="module")
def exp_jumps():
    return cp.discretize_jumps(exp_cdf, STEP, 30.0)


def within(samples, target, z=3.5):
    x = np.asarray(samples, dtype=float)
    se = x.std(ddof=1) / math.sqrt(x.size)
    return abs(x.mean() - target) < z * se


def test_unit_jumps_recover_poisson_counts():
    p, at = FieldParams(1.5, 1, 1), Q(2, 1)
    jumps = cp.point_mass_grid(1.0, 0.25, upper=40)
    g = cp.cfprf_distribution(p, jumps, at)
    for y in (0.0, 0.5, 1.0, 2.0, 3.7, 6.0):
        assert g.cdf_at(y) == pytest.approx(stats.poisson.cdf(math.floor(y), 3.0), abs=1e-9)
    assert g.cdf_at(-0.1) == 0.0


def test_zero_horizon_is_pure_atom(exp_jumps):
    g = cp.cfprf_distribution(FieldParams(1, 0.8, 0.8), exp_jumps, Q(0, 1))
    assert g.atom_at_zero == 1.0
    assert g.total_mass() == pytest.approx(1.0, abs=1e-15)
    assert np.all(g.masses == 0)


def test_compound_cdf_against_simulation(exp_jumps):
    p, at = FieldParams(1, 0.8, 0.8), Q(1, 1)
    g = cp.cfprf_distribution(p, exp_jumps, at)
    assert g.atom_at_zero == pytest.approx(an.pmf(p, 0, at).value, rel=1e-14)
    y = cp.sample_cfprf(p, lambda gen, n: gen.exponential(1.0, n), at, RngStream(3), 10 ** 5)
    for v in (0.5, 1.0, 2.0):
        assert within(y <= v, float(g.cdf_at(v)))


def test_mass_monotone_non_negative(exp_jumps):
    eps = 1e-10
    g = cp.cfprf_distribution(FieldParams(1, 0.7, 0.9), exp_jumps, Q(1, 1), eps_tail=eps)
    assert np.all(g.masses >= 0)
    c = g.cdf().masses
    assert np.all(np.diff(c) >= 0)
    # grid rounding puts half a node of jump mass at 0; the jump law itself drops e^{-30}
    assert g.total_mass() == pytest.approx(1.0, abs=eps + 1e-8)


def test_eps_tail_validation(exp_jumps):
    with pytest.raises(DomainError):
        cp.cfprf_distribution(FieldParams(1, 1, 1), exp_jumps, Q(1, 1), eps_tail=0.01)
    bad = GridDistribution(0.0, 0.1, np.full(5, 1.0))
    with pytest.raises(DomainError):
        cp.cfprf_distribution(FieldParams(1, 1, 1), bad, Q(1, 1))


def test_sample_cfprf_examples():
    p = FieldParams(1, 0.8, 0.8)
    z = cp.sample_cfprf(p, lambda g, n: g.exponential(1.0, n), Q(0, 1), RngStream(4), 100)
    assert np.all(z == 0)
    a = cp.sample_cfprf(p, lambda g, n: np.ones(n), Q(1, 1), RngStream(5), 10 ** 5)
    b = sm.sample_fprf(p, Q(1, 1), RngStream(6), 10 ** 5)
    top = 8
    ca = np.bincount(np.minimum(a.astype(int), top), minlength=top + 1)
    cb = np.bincount(np.minimum(b, top), minlength=top + 1)
    assert stats.chi2_contingency(np.vstack([ca, cb]))[1] > 0.01


@pytest.mark.parametrize("p,jmean", [(FieldParams(1, 0.8, 0.8), 1.0), (FieldParams(2, 0.6, 0.9), 0.5)])
def test_wald_identity(p, jmean):
    at = Q(1, 1)
    y = cp.sample_cfprf(p, lambda g, n: g.exponential(jmean, n), at, RngStream(7), 10 ** 5)
    assert within(y, jmean * an.moments(p, at)[0])


def test_generic_compound_cdf_limits(exp_jumps):
    p, at = FieldParams(1, 0.8, 0.8), Q(1, 1)
    pmf = lambda k: an.pmf(p, k, at).value
    Fz = cp.grid_fold_cdf(exp_jumps)
    assert cp.generic_compound_cdf(pmf, Fz, -0.5) == 0.0
    assert cp.generic_compound_cdf(pmf, lambda k, y: 1.0, 1e6, eps_tail=1e-10) == pytest.approx(1.0, abs=1e-10)


def test_generic_matches_grid_law_on_shared_grid(exp_jumps):
    p, at = FieldParams(1, 0.8, 0.8), Q(1, 1)
    g = cp.cfprf_distribution(p, exp_jumps, at)
    pmf = lambda k: an.pmf(p, k, at).value
    Fz = cp.grid_fold_cdf(exp_jumps)
    for y in (0.3, 1.0, 2.5):
        assert cp.generic_compound_cdf(pmf, Fz, y) == pytest.approx(float(g.cdf_at(y)), abs=1e-9)


def test_generic_with_gpp_counts_against_simulation():
    p, meas = GppParams(0.7, 1, 1), 1.0
    pmf = lambda k: gpp.gen_field_pmf(p, meas, k).value
    # exact Erlang folds of exponential(1) jumps
    Fz = lambda k, y: stats.gamma.cdf(y, k)
    want = cp.generic_compound_cdf(pmf, Fz, 1.0)
    s = RngStream(8)
    k = sm.sample_gpp(p, meas, s, 10 ** 5)
    y = np.bincount(np.repeat(np.arange(k.size), k), weights=s.generator.exponential(1.0, k.sum()),
                    minlength=k.size)
    assert within(y <= 1.0, want)


def test_gen_compound_cf_examples():
    p = GppParams(1, 1, 1.3)
    phi = np.exp(0.7j)
    assert cp.gen_compound_cf(p, 2.0, phi) == pytest.approx(np.exp(1.3 * 2.0 * (phi - 1)), rel=1e-13)
    assert cp.gen_compound_cf(GppParams(0.8, 0.5, 1.0), 1.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        cp.gen_compound_cf(p, 1.0, 1.5)


def test_gen_compound_cf_fourier_inversion():
    p, meas, N = GppParams(0.8, 0.5, 1.0), 1.0, 256
    u = 2 * np.pi * np.arange(N) / N
    cf = np.array([cp.gen_compound_cf(p, meas, np.exp(1j * ui)) for ui in u])
    pmf = np.real(np.fft.fft(cf)) / N
    for k in range(12):
        assert abs(pmf[k] - gpp.gen_field_pmf(p, meas, k).value) < 1e-6


@given(st.floats(0.01, 0.5), st.floats(0.5, 5))
def test_point_mass_grid_is_normalized(step, value):
    g = cp.point_mass_grid(value, step)
    assert g.total_mass() == pytest.approx(1.0, rel=1e-12)
    assert g.cdf_at(value + step / 2) == pytest.approx(1.0, rel=1e-12)


def test_grid_validation_and_cdf_kind():
    with pytest.raises(DomainError):
        GridDistribution(0.0, 0.0, np.ones(3))
    with pytest.raises(DomainError):
        GridDistribution(0.0, 1.0, [-1.0, 2.0])
    with pytest.raises(DomainError):
        GridDistribution(0.0, 1.0, [0.5, 0.2], kind="cdf")
    c = GridDistribution(0.0, 1.0, [0.2, 0.6, 1.0], kind="cdf")
    assert c.cdf() is c and c.total_mass() == 1.0


def test_grid_csv_round_trip(tmp_path, exp_jumps):
    g = cp.cfprf_distribution(FieldParams(1, 0.8, 0.8), exp_jumps, Q(1, 1))
    path = tmp_path / "g.csv"
    cp.write_grid_csv(g, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# {") and lines[1] == "y,cdf,density"
    back = cp.read_grid_csv(path)
    assert back.atom_at_zero == g.atom_at_zero and back.step == g.step
    np.testing.assert_array_equal(back.masses, g.masses)
