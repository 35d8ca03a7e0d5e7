"""Named validation scenarios cross-checking analytic laws against oracles.

Each scenario is deterministic given its seed and returns a list of
:class:`Check` records.  The CLI ``validate`` command and the acceptance
tests both run these functions.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, stats

from . import analytic as an
from . import compound as cp
from . import gpp
from . import motion as mo
from . import sampling as sm
from . import specfun as sf
from .analytic import FieldParams, QuadrantPoint
from .sampling import RngStream

__all__ = ["Check", "ScenarioResult", "SCENARIOS", "run_scenario", "run_all", "pooled_cells"]

UNIT = QuadrantPoint(1.0, 1.0)
Z_MAX = 3.5


@dataclass
class Check:
    """``statistic`` compared with ``threshold``; ``upper`` means ``statistic < threshold`` passes."""

    name: str
    statistic: float
    threshold: float
    upper: bool = True

    @property
    def passed(self) -> bool:
        s = self.statistic
        if not np.isfinite(s):
            return False
        return s < self.threshold if self.upper else s > self.threshold

    def as_dict(self) -> dict:
        d = asdict(self)
        d["statistic"] = float(self.statistic)
        d["pass"] = self.passed
        return d


@dataclass
class ScenarioResult:
    name: str
    checks: list
    seconds: float
    budget: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.seconds < self.budget

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "seconds": self.seconds,
                "budget_seconds": self.budget, "checks": [c.as_dict() for c in self.checks]}


def _z(est, target, se):
    if se == 0:
        return 0.0 if est == target else math.inf
    return abs(est - target) / se


def pooled_cells(q: np.ndarray, freq: np.ndarray, n: int, min_expected: float = 5.0):
    """z-scores of the cells with ``n q >= min_expected`` plus one pooled tail cell.

    ``q`` is the analytic pmf on ``0..K`` and ``freq`` the empirical
    frequencies on the same support (missing entries are zero).  Standard
    errors use the analytic ``sqrt(q (1 - q) / n)``.
    """
    K = max(q.size, freq.size)
    q = np.pad(q, (0, K - q.size))
    f = np.pad(freq, (0, K - freq.size))
    big = n * q >= min_expected
    zs = [_z(f[i], q[i], math.sqrt(q[i] * (1 - q[i]) / n)) for i in np.nonzero(big)[0]]
    qt, ft = 1.0 - q[big].sum(), 1.0 - f[big].sum()
    qt = max(qt, 0.0)
    if qt > 0:
        zs.append(_z(ft, qt, math.sqrt(qt * (1 - qt) / n)))
    return np.array(zs)


# ---------------------------------------------------------------- 1-4, 6-8: deterministic

def poisson_reduction(seed=0):
    worst = 0.0
    for x in (0.5, 1.0, 5.0):
        p = FieldParams(x, 1.0, 1.0)
        for k in range(41):
            exact = math.exp(k * math.log(x) - x - math.lgamma(k + 1))
            worst = max(worst, abs(an.pmf(p, k, UNIT).value - exact))
    return [Check("poisson pmf max |diff|", worst, 1e-12)]


def normalization(seed=0):
    out = []
    for nu in ((0.6, 0.6), (0.9, 0.7), (1.0, 0.5)):
        for x in (0.5, 1.0, 2.0):
            p = FieldParams(x, *nu)
            assert an.convergence_regime(p, UNIT).usable
            q = an.pmf_vector(p, UNIT, 80)
            out.append(Check(f"sum pmf nu={nu} lamT={x}", abs(math.fsum(q) - 1), 1e-8))
    return out


def adomian(seed=0):
    bad = 0
    for n in range(13):
        for k in range(15):
            r = Fraction(an.adomian_component(n, k, "recursive"))
            c = Fraction(an.adomian_component(n, k, "closed"))
            bad += r != c
    printed = [an.adomian_component(4, 0, "recursive") == 24,
               an.adomian_component(3, 1, "recursive") == 18,
               an.adomian_component(2, 1, "recursive") == -4]
    return [Check("recursive != closed count (n<=12, k<=14)", bad, 0.5),
            Check("printed values mismatched", 3 - sum(printed), 0.5)]


def route_equivalence(seed=0):
    p = FieldParams(1.0, 0.9, 0.9)
    worst = max(abs(an.pmf(p, k, UNIT, route="series").value
                    - an.pmf(p, k, UNIT, route="integral").value) for k in range(11))
    return [Check("series vs integral max |diff|", worst, 1e-6)]


def covariance(seed=0):
    g = RngStream(seed).generator
    worst = 0.0
    for _ in range(50):
        p = FieldParams(g.uniform(0.2, 3), g.uniform(0.3, 1), g.uniform(0.3, 1))
        t = QuadrantPoint(g.uniform(0.2, 2), g.uniform(0.2, 2))
        worst = max(worst, abs(an.covariance(p, t, t) - an.moments(p, t)[1]))
    prf = 0.0
    for lam, tau, t in ((3.0, (1, 2), (2, 3)), (1.5, (0.3, 0.7), (1.1, 0.9)), (0.7, (2, 1), (2, 4))):
        c = an.covariance(FieldParams(lam, 1, 1), QuadrantPoint(*tau), QuadrantPoint(*t))
        prf = max(prf, abs(c - lam * tau[0] * tau[1]))
    return [Check("cov(t,t) - var max |diff|", worst, 1e-10),
            Check("PRF cov - lam tau1 tau2 max |diff|", prf, 1e-10)]


def special_functions(seed=0):
    ml = sf.mittag_leffler
    a, b, g, lam, w = 0.7, 1.0, 2.0, -1.0, 2.0
    f = lambda t: math.exp(-w * t) * t ** (b - 1) * ml(a, b, g, lam * t ** a).value
    lap = integrate.quad(f, 0, np.inf, epsabs=1e-12, epsrel=1e-11, limit=200)[0]
    pair = abs(lap - w ** (a * g - b) / (w ** a - lam) ** g)
    a1, c, s1 = 0.6, -1.0, 1.5
    f1 = lambda x: math.exp(-s1 * x) * ml(a1, 1, 1, c * x ** a1).value
    lap1 = integrate.quad(f1, 0, np.inf, epsabs=1e-12, epsrel=1e-11, limit=200)[0]
    pair1 = abs(lap1 - s1 ** (a1 - 1) / (s1 ** a1 - c))
    h = 1e-4
    deriv = 0.0
    for al in (0.5, 0.8):
        E = lambda x: ml(al, 1, 1, x).value
        for x in np.linspace(-2, 2, 9):
            d1 = (E(x + h) - E(x - h)) / (2 * h)
            d2 = (E(x + h) - 2 * E(x) + E(x - h)) / h ** 2
            deriv = max(deriv, abs(d1 - ml(al, 1 + al, 2, x).value),
                        abs(d2 - 2 * ml(al, 1 + 2 * al, 3, x).value))
    xs = np.linspace(0, 6, 31)
    wr = max(abs(sf.wright_w(-0.5, 0.5, -x).value - math.exp(-x * x / 4) / math.sqrt(math.pi))
             for x in xs)
    return [Check("Laplace pair (0.7,1,2,-1,2)", pair, 1e-6),
            Check("one-parameter Laplace pair (0.6,-1,1.5)", pair1, 1e-6),
            Check("derivative identity k=1,2 max |diff|", deriv, 1e-4),
            Check("W_{-1/2,1/2}(-x) vs reflecting-BM density", wr, 1e-8)]


def gpp_reductions(seed=0):
    two = 0.0
    for a1, a2, x in ((0.9, 0.9, 1.0), (0.8, 0.7, 0.5), (1.0, 0.6, 1.5)):
        tp = gpp.TwoIndexParams(a1, 1.0, a2, 1.0, x)
        fp = FieldParams(x, a1, a2)
        for k in range(16):
            two = max(two, abs(gpp.two_index_pmf(tp, UNIT, k).value - an.pmf(fp, k, UNIT).value))
    pois = 0.0
    for x in (0.5, 2.0, 7.0):
        for k in range(41):
            exact = math.exp(k * math.log(x) - x - math.lgamma(k + 1))
            pois = max(pois, abs(gpp.gen_field_pmf(gpp.GppParams(1, 1, x), 1.0, k).value - exact))
    out = [Check("two-index gamma=(1,1) vs FPRF", two, 1e-10),
           Check("gen_field_pmf alpha=gamma=1 vs Poisson", pois, 1e-12)]
    for a, g in ((0.5, 0.5), (0.8, 1.0), (0.7, 0.5)):
        p = gpp.GppParams(a, g, 1.0)
        tot = math.fsum(gpp.gen_field_pmf(p, 1.0, k).value for k in range(200))
        out.append(Check(f"gen_field_pmf normalisation ({a},{g})", abs(tot - 1), 1e-8))
    return out


# ---------------------------------------------------------------- 5, 9-13: Monte Carlo

def fprf_mc(seed=11, n=100_000):
    p = FieldParams(1.0, 0.8, 0.8)
    x = sm.sample_fprf(p, UNIT, RngStream(seed), n)
    freq, _ = sm.empirical_pmf(x)
    K = max(freq.size, 40)
    q = an.pmf_vector(p, UNIT, K - 1)
    zs = pooled_cells(q, freq, n)
    tv = 0.5 * np.abs(np.pad(freq, (0, K - freq.size)) - q).sum() + 0.5 * max(0.0, 1 - q.sum())
    return [Check("max |z| over pmf cells (pooled tail)", float(zs.max()), Z_MAX),
            Check("total variation", float(tv), 0.01)]


def linear_motion(seed=5, n=100_000):
    m = mo.MotionParams(2.0, 1.0, 1.0)
    x = mo.simulate_linear(m, None, RngStream(seed, 0), n)
    out = [Check(f"telegraph CF eta={eta}", abs(np.mean(np.cos(eta * x)) - mo.linear_cf(m, eta)), 0.01)
           for eta in (0.5, 1.0, 2.0, 5.0)]
    y = mo.simulate_linear(m, "reflecting_bm", RngStream(seed, 1), n)
    out += [Check(f"time-changed CF eta={eta}",
                  abs(np.mean(np.cos(eta * y)) - mo.linear_cf_timechanged(0.5, 1.0, m, eta)), 0.02)
            for eta in (0.5, 1.0, 2.0)]
    return out


def _mixture_oracle(rho, t=1.0, v=1.0):
    """``int p(rho | k=2, u) f_{|B(t)|}(u) du`` with the uniform-disk law and Gaussian ``f``."""
    f = lambda u: math.exp(-u * u / (4 * t)) / (math.pi ** 1.5 * v * v * u * u * math.sqrt(t))
    return integrate.quad(f, rho / v, np.inf, epsabs=1e-13, epsrel=1e-11)[0]


def planar_motion(seed=3, n=100_000):
    m = mo.MotionParams(1.5, 1.0, 1.0)
    R = m.v * m.t
    out = []
    s2 = mo.simulate_planar(m, None, RngStream(seed, 2), n, condition_k=2)
    # uniform disk: r^2 / R^2 and the angle are independent uniforms
    r2 = (s2.position ** 2).sum(axis=1) / R ** 2
    th = np.mod(np.arctan2(s2.position[:, 1], s2.position[:, 0]), 2 * np.pi)
    obs = np.histogram2d(r2, th, bins=(10, 12), range=((0, 1), (0, 2 * np.pi)))[0].ravel()
    out.append(Check("k=2 2-D chi-square p-value", stats.chisquare(obs).pvalue, 0.01, upper=False))
    for k in (1, 3):
        sk = mo.simulate_planar(m, None, RngStream(seed, k), n, condition_k=k)
        r = np.hypot(*sk.position.T) / R
        edges = np.linspace(0, 1, 21)
        F = 1 - (1 - edges ** 2) ** (k / 2)
        obs = np.histogram(r, edges)[0]
        out.append(Check(f"k={k} radial chi-square p-value",
                         stats.chisquare(obs, np.diff(F) * n).pvalue, 0.01, upper=False))
    mu = mo.MotionParams(1.0, 1.0, 1.0)
    grid = np.linspace(0.05, 2 * mu.v * math.sqrt(mu.t), 40)
    sup = max(abs(mo.frac_planar_cond_density(0.5, 1.0, 2, mu, r, route="hankel") - _mixture_oracle(r))
              for r in grid)
    out.append(Check("fractional density vs reflecting-BM mixture (sup)", sup, 0.05))
    return out


def frac_integral(seed=1, n=20_000):
    p = FieldParams(1.0, 1.0, 1.0)
    mom = an.frac_integral_moments(0.5, 0.5, p, UNIT)
    s = RngStream(seed)
    vals = np.array([sm.frac_integral_of_field(sm.sample_prf(1.0, UNIT, s), 0.5, 0.5, UNIT)
                     for _ in range(n)])
    mean, var = vals.mean(), vals.var(ddof=1)
    se_mean = math.sqrt(var / n)
    m4 = np.mean((vals - mean) ** 4)
    se_var = math.sqrt(max(m4 - var * var, 0.0) / n)
    return [Check("mean z", _z(mean, mom.prf_mean, se_mean), Z_MAX),
            Check("variance z", _z(var, mom.prf_variance, se_var), Z_MAX)]


def _marks(p, n, s):
    counts = sm.sample_fprf(p, UNIT, s, n)
    u = s.generator.uniform(size=int(counts.sum()))
    group = np.repeat(np.arange(n), counts)
    return counts, u, group


def order_stats(seed=13, n=100_000):
    out = []
    Fv = 0.5
    p = FieldParams(1.0, 0.8, 0.8)
    counts, u, group = _marks(p, n, RngStream(seed, 0))
    below = np.bincount(group, weights=(u <= Fv), minlength=n)
    sel = counts >= 2
    est = np.mean(below[sel] >= 2)
    q = an.order_stat_cdf(p, 2, Fv, UNIT)
    out.append(Check("2nd order statistic z", _z(est, q, math.sqrt(q * (1 - q) / sel.sum())), Z_MAX))
    p2 = FieldParams(1.0, 0.7, 0.9)
    Fv = 0.4
    counts, u, group = _marks(p2, n, RngStream(seed, 1))
    below = np.bincount(group, weights=(u <= Fv), minlength=n)
    above = counts - below
    pos = counts >= 1
    events = {
        "min_conditional": (below[pos] >= 1, pos.sum()),
        "max_conditional": (above[pos] == 0, pos.sum()),
        "min_unconditional_tail": (below == 0, n),
        "max_unconditional": (above == 0, n),
    }
    for which, (hits, m) in events.items():
        q = an.extreme_stats(p2, Fv, UNIT, which)
        out.append(Check(f"{which} z", _z(np.mean(hits), q, math.sqrt(q * (1 - q) / m)), Z_MAX))
    return out


def compound_checks(seed=17, n=100_000):
    out = []
    worst = 0.0
    for lam, meas in ((1.0, 1.0), (2.5, 0.7)):
        for u in (0.3, 1.0, 2.0):
            phi = complex(math.cos(u), math.sin(u))
            val = cp.gen_compound_cf(gpp.GppParams(1, 1, lam), meas, phi)
            worst = max(worst, abs(val - np.exp(lam * meas * (phi - 1))))
    out.append(Check("alpha=gamma=1 compound CF vs exponential", worst, 1e-10))
    p = FieldParams(1.0, 0.8, 0.8)
    jumps = cp.discretize_jumps(lambda y: -np.expm1(-np.asarray(y)), 2e-3, 30.0)
    law = cp.cfprf_distribution(p, jumps, UNIT)
    y = cp.sample_cfprf(p, lambda g, k: g.exponential(1.0, k), UNIT, RngStream(seed, 0), n)
    for q_y in (0.5, 1.0, 2.0):
        q = float(law.cdf_at(q_y))
        out.append(Check(f"CFPRF cdf y={q_y} z", _z(np.mean(y <= q_y), q, math.sqrt(q * (1 - q) / n)), Z_MAX))
    for i, (pp, jm) in enumerate(((p, 1.0), (FieldParams(2.0, 0.6, 0.9), 0.5))):
        yy = cp.sample_cfprf(pp, lambda g, k, jm=jm: g.exponential(jm, k), UNIT, RngStream(seed, 1 + i), n)
        target = jm * an.moments(pp, UNIT)[0]
        out.append(Check(f"Wald mean z (set {i + 1})", _z(yy.mean(), target, yy.std(ddof=1) / math.sqrt(n)), Z_MAX))
    return out


# budgets in seconds, in criterion order
SCENARIOS = {
    "poisson-reduction": (poisson_reduction, 1.0),
    "normalization": (normalization, 5.0),
    "adomian": (adomian, 1.0),
    "route-equivalence": (route_equivalence, 30.0),
    "fprf-mc": (fprf_mc, 60.0),
    "covariance": (covariance, 1.0),
    "special-functions": (special_functions, 10.0),
    "gpp-reductions": (gpp_reductions, 5.0),
    "linear-motion": (linear_motion, 120.0),
    "planar-motion": (planar_motion, 180.0),
    "frac-integral": (frac_integral, 120.0),
    "order-stats": (order_stats, 60.0),
    "compound": (compound_checks, 90.0),
}


def run_scenario(name: str, seed: int | None = None) -> ScenarioResult:
    if name not in SCENARIOS:
        raise KeyError(name)
    fn, budget = SCENARIOS[name]
    t0 = time.perf_counter()
    checks = fn() if seed is None else fn(seed)
    return ScenarioResult(name, checks, time.perf_counter() - t0, budget)


def run_all(seed: int | None = None) -> list:
    return [run_scenario(name, seed) for name in SCENARIOS]
