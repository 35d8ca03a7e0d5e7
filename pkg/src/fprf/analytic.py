"""Closed-form laws of the fractional Poisson random field on the quadrant.

Throughout, ``x = lam * t1**nu1 * t2**nu2`` is the effective argument of
the series.  The field is a planar Poisson field of rate ``lam`` observed
at two independent inverse stable times ``(L_nu1(t1), L_nu2(t2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import specfun as sf
from .errors import DomainError, NumericError, QuadratureError
from .specfun import DEFAULT_CONTROL, EvalReport, SeriesControl, gammaln

__all__ = [
    "FieldParams", "QuadrantPoint", "ConvergenceRegime", "convergence_regime",
    "pmf", "pmf_vector", "pmf_via_integral", "adomian_component", "moments",
    "covariance", "pgf", "capacity", "factorial_moment",
    "FracIntegralMoments", "frac_integral_moments", "order_stat_cdf",
    "extreme_stats", "prf_conditional_binomial", "alt_field_stats",
]


@dataclass(frozen=True)
class FieldParams:
    """Rate ``lam > 0`` and fractional orders ``nu1, nu2`` in (0, 1]."""

    lam: float
    nu1: float
    nu2: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("rate must be positive")
        for nu in (self.nu1, self.nu2):
            if not 0 < nu <= 1:
                raise DomainError("fractional orders must lie in (0, 1]")

    def with_rate(self, lam: float) -> "FieldParams":
        return replace(self, lam=lam)


@dataclass(frozen=True)
class QuadrantPoint:
    t1: float
    t2: float

    def __post_init__(self):
        if self.t1 < 0 or self.t2 < 0:
            raise DomainError("quadrant coordinates must be non-negative")

    def precedes(self, other: "QuadrantPoint") -> bool:
        return self.t1 <= other.t1 and self.t2 <= other.t2


@dataclass(frozen=True)
class ConvergenceRegime:
    s: float
    radius: float
    usable: bool


def _arg(p: FieldParams, at: QuadrantPoint) -> float:
    return p.lam * at.t1 ** p.nu1 * at.t2 ** p.nu2


def convergence_regime(p: FieldParams, at: QuadrantPoint) -> ConvergenceRegime:
    """Classify the pmf series: entire for s > 1, finite radius at s = 1."""
    return _classify(p.nu1, p.nu2, _arg(p, at))


def _classify(nu1, nu2, x):
    s = nu1 + nu2
    if s > 1 + 1e-12:
        radius = math.inf
    elif abs(s - 1) <= 1e-12:
        radius = nu1 ** nu1 * nu2 ** nu2
    else:
        radius = 0.0
    return ConvergenceRegime(s, radius, x < 0.9 * radius)


# ---------------------------------------------------------------- pmf routes

def _poisson_pmf(x, k):
    if x == 0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(x) - x - math.lgamma(k + 1))


def _series_pmf(nu1, nu2, x, k, ctl):
    """Sum of (-1)^(n-k) n!^2 / (k!(n-k)!) x^n / (Gamma(n nu1 + 1) Gamma(n nu2 + 1))."""
    lx = math.log(x)
    lk = math.lgamma(k + 1)

    def chunk(m0, m1):
        m = np.arange(m0, m1, dtype=float)
        n = m + k
        parts = (n * lx, lk, 2 * gammaln(n + 1), gammaln(m + 1), gammaln(n * nu1 + 1), gammaln(n * nu2 + 1))
        logt = parts[0] - parts[1] + parts[2] - parts[3] - parts[4] - parts[5]
        with np.errstate(over="ignore"):
            t = np.exp(np.minimum(logt, 745.0))
        return np.where(m % 2 == 1, -t, t), sum(np.abs(q) for q in parts)

    value, n, err, amax = sf.sum_series(chunk, ctl)
    return sf._report(value, n, err, amax), amax


def _one_sided_pmf(nu, x, k, ctl):
    """One order equal to 1: pmf = x^k E^{k+1}_{nu, k nu + 1}(-x)."""
    return sf.ml_count_pmf(nu, 1.0, x, k, ctl)


def _trivial(p, k, at):
    if at.t1 == 0 or at.t2 == 0:
        return sf._closed(1.0 if k == 0 else 0.0)
    if p.nu1 == 1 and p.nu2 == 1:
        return sf._closed(_poisson_pmf(_arg(p, at), k))
    return None


def pmf(p: FieldParams, k: int, at: QuadrantPoint, ctl: SeriesControl = DEFAULT_CONTROL,
        route: str = "auto") -> EvalReport:
    """State probability ``Pr{N(t1, t2) = k}``.

    ``route`` is one of ``auto``, ``series`` (Wright form), ``integral``
    (inverse-stable kernels) or ``closed`` (orders equal to 1).  ``auto``
    uses the series when the classifier marks it usable and it keeps its
    digits, and falls back to a quadrature route otherwise.  Values are
    clamped to [0, 1]; far-tail values below the absolute tolerance can
    otherwise come out as tiny negatives.
    """
    rep = _pmf_raw(p, k, at, ctl, route)
    v = min(1.0, max(0.0, rep.value))
    return rep if v == rep.value else replace(rep, value=v)


def _pmf_raw(p, k, at, ctl, route):
    k = int(k)
    if k < 0:
        raise DomainError("count must be non-negative")
    if route == "auto":
        triv = _trivial(p, k, at)
        if triv is not None:
            return triv
    x = _arg(p, at)
    if route == "closed":
        triv = _trivial(p, k, at)
        if triv is not None:
            return triv
        if 1.0 in (p.nu1, p.nu2):
            return _one_sided_pmf(p.nu2 if p.nu1 == 1 else p.nu1, x, k, ctl)
        raise DomainError("closed route needs an order equal to 1")
    if route == "integral":
        return pmf_via_integral(p, k, at)
    if route not in ("auto", "series"):
        raise ValueError(f"unknown route {route!r}")
    if x == 0:
        return sf._closed(1.0 if k == 0 else 0.0)
    reg = _classify(p.nu1, p.nu2, x)
    if route == "series":
        if not reg.usable:
            raise sf.DivergentSeries(f"series not usable (s={reg.s:g}, x={x:g})")
        return _series_pmf(p.nu1, p.nu2, x, k, ctl)[0]
    if reg.usable:
        try:
            rep, amax = _series_pmf(p.nu1, p.nu2, x, k, ctl)
            if sf._precise_enough(rep.error_estimate, rep.value, amax, ctl):
                return rep
        except NumericError:
            pass
    if 1.0 in (p.nu1, p.nu2):
        return _one_sided_pmf(p.nu2 if p.nu1 == 1 else p.nu1, x, k, ctl)
    return pmf_via_integral(p, k, at)


# -- integral route

_GL_ORDER = 24


@lru_cache(maxsize=None)
def _gl(order):
    return np.polynomial.legendre.leggauss(order)


def _inverse_stable_tail(nu, y):
    """``Pr{L_nu(1) > y}`` from the Kanter representation."""
    u, w = sf._kanter_nodes(256)
    A = (np.sin(nu * u) / np.sin(u)) ** (1 / (1 - nu)) * np.sin((1 - nu) * u) / np.sin(nu * u)
    return float(np.sum(w * np.exp(-A * y ** (1 / (1 - nu)))) / np.pi)


def _marginal(nu, upper, panels):
    """Nodes and density-weighted weights for ``L_nu(1)`` on ``[0, upper]``."""
    if nu == 1:
        return np.array([1.0]), np.array([1.0])
    u, w = _gl(_GL_ORDER)
    h = upper / panels
    left = np.arange(panels)[:, None] * h
    y = (left + 0.5 * h * (u + 1)).ravel()
    wt = np.tile(0.5 * h * w, panels)
    return y, wt * sf.m_wright(nu, y)


def _upper(nu, tail_tol=1e-10):
    if nu == 1:
        return 1.0
    upper = 4.0
    while _inverse_stable_tail(nu, upper) >= tail_tol:
        upper *= 2
        if upper > 1e6:
            raise QuadratureError("inverse stable tail does not decay")
    return upper


def _integral_table(nu1, nu2, x, ks, tol=1e-11, max_nodes=2 ** 20):
    ks = np.asarray(ks, dtype=int)
    up1, up2 = _upper(nu1), _upper(nu2)
    lgk = gammaln(ks + 1.0)
    prev = None
    panels = 4
    while True:
        y1, w1 = _marginal(nu1, up1, panels)
        y2, w2 = _marginal(nu2, up2, panels)
        if y1.size * y2.size > max_nodes:
            raise QuadratureError("integral route exceeded the node cap")
        mu = x * y1[:, None] * y2[None, :]
        with np.errstate(divide="ignore"):
            lmu = np.log(mu)
        vals = np.empty(ks.size)
        for i, k in enumerate(ks):
            if k == 0:
                kern = np.exp(-mu)
            else:
                kern = np.where(mu > 0, np.exp(k * lmu - mu - lgk[i]), 0.0)
            vals[i] = w1 @ kern @ w2
        if prev is not None:
            diff = float(np.max(np.abs(vals - prev)))
            if diff < tol:
                return vals, diff, y1.size * y2.size
        if nu1 == 1 and nu2 == 1:
            return vals, 0.0, 1
        prev = vals
        panels *= 2


def pmf_via_integral(p: FieldParams, k: int, at: QuadrantPoint, tol: float = 1e-11) -> EvalReport:
    """pmf as a Poisson mixture over the inverse-stable densities ``M_nu``.

    Tensor Gauss-Legendre on a domain extended until the kernel tail mass
    is below 1e-10, with the panel count doubled until successive
    estimates agree to ``tol``.  An order equal to 1 collapses that
    dimension to a point mass.
    """
    if at.t1 <= 0 or at.t2 <= 0:
        raise DomainError("integral route needs t1, t2 > 0")
    vals, diff, nodes = _integral_table(p.nu1, p.nu2, _arg(p, at), [int(k)], tol)
    return EvalReport(float(vals[0]), nodes, diff, "quadrature")


def pmf_vector(p: FieldParams, at: QuadrantPoint, kmax: int,
               ctl: SeriesControl = DEFAULT_CONTROL) -> np.ndarray:
    """``[pmf(0), ..., pmf(kmax)]`` with one shared quadrature when needed."""
    ks = np.arange(kmax + 1)
    out = np.empty(ks.size)
    triv = _trivial(p, 0, at)
    if triv is not None:
        return np.array([pmf(p, int(k), at, ctl).value for k in ks])
    x = _arg(p, at)
    reg = _classify(p.nu1, p.nu2, x)
    use_integral = not reg.usable and 1.0 not in (p.nu1, p.nu2)
    if not use_integral:
        for k in ks:
            rep = pmf(p, int(k), at, ctl)
            if rep.regime == "quadrature" and 1.0 not in (p.nu1, p.nu2):
                use_integral = True
                break
            out[k] = rep.value
    if use_integral:
        out = _integral_table(p.nu1, p.nu2, x, ks)[0]
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------- Adomian components

class _Monomial:
    """``coef * (lam t1^nu1 t2^nu2)^n / (Gamma(n nu1 + 1) Gamma(n nu2 + 1))``."""

    __slots__ = ("coef", "n")

    def __init__(self, coef, n):
        self.coef = Fraction(coef)
        self.n = n

    def integrate(self):
        # I^nu t^{n nu} / Gamma(n nu + 1) = t^{(n+1) nu} / Gamma((n+1) nu + 1) in each
        # coordinate; the extra lam comes from the operator, so only n advances
        return _Monomial(self.coef, self.n + 1)


@lru_cache(maxsize=None)
def _adomian_row(n: int) -> tuple:
    """Coefficients ``c(n, k)`` for ``k = 0..n`` by the component recursion."""
    if n == 0:
        return (Fraction(1),)
    prev = _adomian_row(n - 1)

    def c(k):
        return prev[k] if 0 <= k < len(prev) else Fraction(0)

    row = []
    for k in range(n + 1):
        inner = (k + 1) * c(k + 1) - (2 * k + 1) * c(k) + k * c(k - 1)
        row.append(_Monomial(inner, n - 1).integrate().coef)
    return tuple(row)


def adomian_component(n: int, k: int, mode: str = "closed") -> int:
    """Exact coefficient ``c(n, k)`` of the n-th decomposition component.

    ``q^n(k) = c(n, k) x^n / (Gamma(n nu1 + 1) Gamma(n nu2 + 1))``.
    """
    if n < 0 or k < 0:
        raise DomainError("indices must be non-negative")
    if mode == "recursive":
        row = _adomian_row(n)
        val = row[k] if k < len(row) else Fraction(0)
        assert val.denominator == 1
        return int(val)
    if mode != "closed":
        raise ValueError(f"unknown mode {mode!r}")
    if k > n:
        return 0
    if k == 0:
        return (-1) ** n * math.factorial(n)
    falling = math.factorial(n) // math.factorial(k)  # n_(n-k)
    return (-1) ** (n - k) * falling * (math.factorial(n) // math.factorial(n - k))


# ---------------------------------------------------------------- moments and friends

def moments(p: FieldParams, at: QuadrantPoint) -> tuple[float, float]:
    """Mean and variance of ``N(t1, t2)``."""
    x = _arg(p, at)
    g1 = math.gamma(p.nu1 + 1) * math.gamma(p.nu2 + 1)
    g2 = math.gamma(2 * p.nu1 + 1) * math.gamma(2 * p.nu2 + 1)
    mean = x / g1
    var = mean + 4 * x * x / g2 - mean * mean
    return mean, var


def covariance(p: FieldParams, tau: QuadrantPoint, t: QuadrantPoint) -> float:
    """``Cov(N(tau), N(t))`` for ``tau`` preceding ``t`` componentwise."""
    if not tau.precedes(t):
        raise DomainError("covariance needs tau <= t componentwise")
    nus = (p.nu1, p.nu2)
    taus, ts = (tau.t1, tau.t2), (t.t1, t.t2)
    a = tau.t1 ** p.nu1 * tau.t2 ** p.nu2
    b = t.t1 ** p.nu1 * t.t2 ** p.nu2
    g = math.gamma(p.nu1 + 1) * math.gamma(p.nu2 + 1)
    first = p.lam * a / g - p.lam ** 2 * a * b / g ** 2
    prod = 1.0
    for nu, s, u in zip(nus, taus, ts):
        ratio = sf.reg_inc_beta(s / u, nu, nu + 1) if s > 0 else 0.0
        prod *= (s ** (2 * nu) + u ** (2 * nu) * ratio) / math.gamma(2 * nu + 1)
    return first + p.lam ** 2 * prod


def pgf(p: FieldParams, z: float, at: QuadrantPoint, ctl: SeriesControl = DEFAULT_CONTROL) -> EvalReport:
    """Probability generating function: the void probability at rate ``lam (1 - z)``."""
    if abs(z) > 1:
        raise DomainError("pgf needs |z| <= 1")
    if z == 1:
        return sf._closed(1.0)
    return pmf(p.with_rate(p.lam * (1 - z)), 0, at, ctl)


def capacity(p: FieldParams, at: QuadrantPoint, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``1 - Pr{N(t1, t2) = 0}``."""
    return min(1.0, max(0.0, 1.0 - pmf(p, 0, at, ctl).value))


def factorial_moment(p: FieldParams, n: int, at: QuadrantPoint) -> float:
    """``E[N (N-1) ... (N-n+1)] = (n!)^2 x^n / (Gamma(n nu1 + 1) Gamma(n nu2 + 1))``."""
    if n < 1:
        raise DomainError("order must be at least 1")
    x = _arg(p, at)
    if x == 0:
        return 0.0
    return math.exp(2 * math.lgamma(n + 1) + n * math.log(x)
                    - math.lgamma(n * p.nu1 + 1) - math.lgamma(n * p.nu2 + 1))


class FracIntegralMoments(NamedTuple):
    fprf_mean: float
    prf_mean: float
    prf_variance: float
    prf_conditional_mean_per_count: float


def frac_integral_moments(alpha1: float, alpha2: float, p: FieldParams,
                          at: QuadrantPoint) -> FracIntegralMoments:
    """Moments of the Riemann-Liouville integrals of the field in both coordinates."""
    if not (alpha1 > 0 and alpha2 > 0):
        raise DomainError("integration orders must be positive")
    G = math.gamma
    a1, a2, t1, t2 = alpha1, alpha2, at.t1, at.t2
    fmean = p.lam * t1 ** (a1 + p.nu1) * t2 ** (a2 + p.nu2) / (G(a1 + p.nu1 + 1) * G(a2 + p.nu2 + 1))
    pmean = p.lam * t1 ** (a1 + 1) * t2 ** (a2 + 1) / (G(a1 + 2) * G(a2 + 2))
    pvar = p.lam
    for a, t in ((a1, t1), (a2, t2)):
        pvar *= t ** (2 * a + 1) / ((2 * a + 1) * G(a + 1) ** 2)
    cond = t1 ** a1 * t2 ** a2 / (G(a1 + 2) * G(a2 + 2))
    return FracIntegralMoments(fmean, pmean, pvar, cond)


# ---------------------------------------------------------------- order statistics

def _void(p: FieldParams, rate: float, at: QuadrantPoint, ctl) -> float:
    if rate <= 0:
        return 1.0
    return pmf(p.with_rate(rate), 0, at, ctl).value


def _tail(p: FieldParams, rate: float, k: int, at: QuadrantPoint, ctl) -> float:
    """``Pr{N >= k}`` at the given rate, clamped to [0, 1]."""
    if rate <= 0:
        return 0.0 if k >= 1 else 1.0
    q = p.with_rate(rate)
    s = math.fsum(pmf(q, j, at, ctl).value for j in range(k))
    return min(1.0, max(0.0, 1.0 - s))


def _check_fv(Fv):
    if not 0 <= Fv <= 1:
        raise DomainError("F(v) must lie in [0, 1]")


def _ratio(num, den):
    if den < 1e-300:
        raise NumericError("order statistic denominator below 1e-300")
    return min(1.0, max(0.0, num / den))


def order_stat_cdf(p: FieldParams, k: int, Fv: float, at: QuadrantPoint,
                   ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``Pr{Y_(k) <= v | N >= k}`` for iid marks with ``F(v) = Fv``."""
    if k < 1:
        raise DomainError("rank must be at least 1")
    _check_fv(Fv)
    return _ratio(_tail(p, p.lam * Fv, k, at, ctl), _tail(p, p.lam, k, at, ctl))


EXTREMES = ("min_conditional", "max_conditional", "min_unconditional_tail", "max_unconditional")


def extreme_stats(p: FieldParams, Fv: float, at: QuadrantPoint, which: str,
                  ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Distribution of the minimum or maximum mark (see ``EXTREMES``)."""
    _check_fv(Fv)
    if which not in EXTREMES:
        raise ValueError(f"unknown statistic {which!r}")
    if which == "min_unconditional_tail":
        return _void(p, p.lam * Fv, at, ctl)
    if which == "max_unconditional":
        return _void(p, p.lam * (1 - Fv), at, ctl)
    q0 = _void(p, p.lam, at, ctl)
    if which == "min_conditional":
        return _ratio(1 - _void(p, p.lam * Fv, at, ctl), 1 - q0)
    return _ratio(_void(p, p.lam * (1 - Fv), at, ctl) - q0, 1 - q0)


def prf_conditional_binomial(k: int, l: int, tau: QuadrantPoint, t: QuadrantPoint) -> float:
    """``Pr{N(tau) = k | N(t) = l}`` for the planar Poisson field."""
    if not 0 <= k <= l:
        raise DomainError("need 0 <= k <= l")
    if not tau.precedes(t) or t.t1 * t.t2 <= 0:
        raise DomainError("need tau <= t componentwise and t1 t2 > 0")
    r = tau.t1 * tau.t2 / (t.t1 * t.t2)
    return math.comb(l, k) * r ** k * (1 - r) ** (l - k)


# ---------------------------------------------------------------- alternate field

ALT_STATS = ("pmf", "mean", "variance", "pgf", "min_tail", "max_cdf")


def alt_field_stats(p: FieldParams, at: QuadrantPoint, what: str, *, k: int | None = None,
                    z: float | None = None, Fv: float | None = None,
                    ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Laws of the field with pmf ``x^k / (Gamma(k nu1 + nu2) E_{nu1,nu2}(x))``."""
    if what not in ALT_STATS:
        raise ValueError(f"unknown statistic {what!r}")
    x = _arg(p, at)
    n1, n2 = p.nu1, p.nu2

    def E(arg, beta=n2, gamma=1.0):
        return sf.mittag_leffler(n1, beta, gamma, arg, ctl).value

    norm = E(x)
    if what == "pmf":
        if k is None or k < 0:
            raise DomainError("pmf needs k >= 0")
        if x == 0:
            return 1.0 if k == 0 else 0.0
        return math.exp(k * math.log(x) - math.lgamma(k * n1 + n2)) / norm
    if what in ("mean", "variance"):
        mean = x * E(x, n1 + n2, 2.0) / norm
        if what == "mean":
            return mean
        return 2 * x * x * E(x, n2 + 2 * n1, 3.0) / norm + mean * (1 - mean)
    if what == "pgf":
        if z is None or abs(z) > 1:
            raise DomainError("pgf needs |z| <= 1")
        return E(x * z) / norm
    if Fv is None:
        raise DomainError("order statistics need Fv")
    _check_fv(Fv)
    if what == "min_tail":
        return E(x * (1 - Fv)) / norm
    return E(x * Fv) / norm
