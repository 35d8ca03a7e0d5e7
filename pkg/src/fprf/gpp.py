"""Generalized Mittag-Leffler counting laws.

Covers the generalized field on a set of Lebesgue measure ``|B|``, the
generalized Poisson process (GPP, the one-dimensional case), moments of
the random time change ``psi_{alpha,gamma}`` and the planar field
time-changed by two independent ``psi`` processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import specfun as sf
from .analytic import QuadrantPoint, _classify
from .errors import DivergentSeries, DomainError
from .specfun import DEFAULT_CONTROL, EvalReport, SeriesControl, WrightParams

__all__ = [
    "GppParams", "TwoIndexParams", "gen_field_pmf", "gpp_stats", "gpp_order_stats",
    "two_index_pmf", "two_index_moments", "psi_moments",
]


def _check_unit(name, value):
    if not 0 < value <= 1:
        raise DomainError(f"{name} must lie in (0, 1]")


@dataclass(frozen=True)
class GppParams:
    alpha: float
    gamma: float
    lam: float

    def __post_init__(self):
        _check_unit("alpha", self.alpha)
        _check_unit("gamma", self.gamma)
        if not self.lam > 0:
            raise DomainError("rate must be positive")

    @property
    def is_poisson(self) -> bool:
        return self.alpha == 1 and self.gamma == 1


@dataclass(frozen=True)
class TwoIndexParams:
    alpha1: float
    gamma1: float
    alpha2: float
    gamma2: float
    lam: float

    def __post_init__(self):
        for name in ("alpha1", "gamma1", "alpha2", "gamma2"):
            _check_unit(name, getattr(self, name))
        if not self.lam > 0:
            raise DomainError("rate must be positive")


def _lpoch(g: float, n: int) -> float:
    """``log (g)_n`` for ``g > 0``."""
    return math.lgamma(g + n) - math.lgamma(g)


def _scale(rep: EvalReport, factor: float) -> EvalReport:
    return EvalReport(factor * rep.value, rep.terms_used, abs(factor) * rep.error_estimate,
                      rep.regime, rep.precision_loss)


def _pmf_x(p: GppParams, x: float, k: int, ctl) -> EvalReport:
    if k < 0:
        raise DomainError("count must be non-negative")
    if x == 0:
        return sf._closed(1.0 if k == 0 else 0.0)
    if p.is_poisson:
        return sf._closed(math.exp(k * math.log(x) - x - math.lgamma(k + 1)))
    return sf.ml_count_pmf(p.alpha, p.gamma, x, k, ctl)


def gen_field_pmf(p: GppParams, measure: float, k: int,
                  ctl: SeriesControl = DEFAULT_CONTROL) -> EvalReport:
    """``Pr{N(B) = k} = (gamma)_k x^k / k! E^{gamma+k}_{alpha, alpha k + 1}(-x)``, ``x = lam |B|^alpha``."""
    if measure < 0:
        raise DomainError("measure must be non-negative")
    return _pmf_x(p, p.lam * measure ** p.alpha, int(k), ctl)


def _E(p: GppParams, arg: float, ctl) -> float:
    return sf.mittag_leffler(p.alpha, 1.0, p.gamma, arg, ctl).value


GPP_STATS = ("pmf", "pgf", "mean", "variance", "factorial_moment",
             "waiting_survival", "conditional_survival")


def gpp_stats(p: GppParams, t: float, what: str, *, k: int | None = None,
              z: float | None = None, n: int | None = None, s: float | None = None,
              ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """One-dimensional laws of the GPP at time ``t``.

    ``conditional_survival`` is ``Pr{W > t + s | W > s}`` for the first
    waiting time ``W``.
    """
    if what not in GPP_STATS:
        raise ValueError(f"unknown statistic {what!r}")
    if t < 0:
        raise DomainError("time must be non-negative")
    x = p.lam * t ** p.alpha
    a, g = p.alpha, p.gamma
    if what == "pmf":
        if k is None:
            raise DomainError("pmf needs k")
        return _pmf_x(p, x, int(k), ctl).value
    if what == "pgf":
        if z is None or abs(z) > 1:
            raise DomainError("pgf needs |z| <= 1")
        return _E(p, (z - 1) * x, ctl)
    if what == "mean":
        return g * x / math.gamma(a + 1)
    if what == "variance":
        m = g * x / math.gamma(a + 1)
        return m + g * (g + 1) * x * x / math.gamma(2 * a + 1) - m * m
    if what == "factorial_moment":
        if n is None or n < 1:
            raise DomainError("factorial moment needs n >= 1")
        if x == 0:
            return 0.0
        return math.exp(_lpoch(g, n) + n * math.log(x) - math.lgamma(n * a + 1))
    if what == "waiting_survival":
        return _E(p, -x, ctl)
    if s is None or s < 0:
        raise DomainError("conditional survival needs s >= 0")
    den = _E(p, -p.lam * s ** a, ctl)
    return _E(p, -p.lam * (t + s) ** a, ctl) / den


def gpp_order_stats(p: GppParams, measure: float, Fv: float, which: str,
                    ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``min_tail = Pr{min > v}`` and ``max_cdf = Pr{max <= v}`` over the marks in ``B``."""
    if not 0 <= Fv <= 1:
        raise DomainError("F(v) must lie in [0, 1]")
    if measure < 0:
        raise DomainError("measure must be non-negative")
    x = p.lam * measure ** p.alpha
    if which == "min_tail":
        return _E(p, -Fv * x, ctl)
    if which == "max_cdf":
        return _E(p, (Fv - 1) * x, ctl)
    raise ValueError(f"unknown statistic {which!r}")


# ---------------------------------------------------------------- two-index field

def _two_x(p: TwoIndexParams, at: QuadrantPoint) -> float:
    return p.lam * at.t1 ** p.alpha1 * at.t2 ** p.alpha2


def _usable_or_raise(p: TwoIndexParams, x: float):
    reg = _classify(p.alpha1, p.alpha2, abs(x))
    if not reg.usable:
        raise DivergentSeries(f"two-index series not usable (s={reg.s:g}, |x|={abs(x):g})")


def two_index_pmf(p: TwoIndexParams, at: QuadrantPoint, k: int,
                  ctl: SeriesControl = DEFAULT_CONTROL) -> EvalReport:
    """pmf of the planar field time-changed by ``psi_{alpha1,gamma1}`` and ``psi_{alpha2,gamma2}``.

    ``x^k / (k! G(g1) G(g2)) 2Psi2[(k+g1,1),(k+g2,1); (a1 k+1,a1),(a2 k+1,a2) | -x]``.
    """
    k = int(k)
    if k < 0:
        raise DomainError("count must be non-negative")
    x = _two_x(p, at)
    if x == 0:
        return sf._closed(1.0 if k == 0 else 0.0)
    _usable_or_raise(p, x)
    wp = WrightParams(((k + p.gamma1, 1.0), (k + p.gamma2, 1.0)),
                      ((p.alpha1 * k + 1, p.alpha1), (p.alpha2 * k + 1, p.alpha2)))
    rep = sf.gen_wright(wp, -x, ctl)
    factor = math.exp(k * math.log(x) - math.lgamma(k + 1)
                      - math.lgamma(p.gamma1) - math.lgamma(p.gamma2))
    return _scale(rep, factor)


def _two_factorial(p: TwoIndexParams, x: float, n: int) -> float:
    if x == 0:
        return 0.0
    return math.exp(math.lgamma(n + p.gamma1) + math.lgamma(n + p.gamma2)
                    - math.lgamma(p.gamma1) - math.lgamma(p.gamma2) + n * math.log(x)
                    - math.lgamma(n * p.alpha1 + 1) - math.lgamma(n * p.alpha2 + 1))


def two_index_moments(p: TwoIndexParams, at: QuadrantPoint, what: str, *,
                      n: int | None = None, z: float | None = None,
                      ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Mean, variance, factorial moments and pgf of the two-index field.

    All moments follow from the factorial moments
    ``G(n+g1) G(n+g2) x^n / (G(g1) G(g2) G(n a1 + 1) G(n a2 + 1))``.
    """
    x = _two_x(p, at)
    if what == "mean":
        return _two_factorial(p, x, 1)
    if what == "variance":
        m = _two_factorial(p, x, 1)
        return m + _two_factorial(p, x, 2) - m * m
    if what == "factorial_moment":
        if n is None or n < 1:
            raise DomainError("factorial moment needs n >= 1")
        return _two_factorial(p, x, int(n))
    if what == "pgf":
        if z is None or abs(z) > 1:
            raise DomainError("pgf needs |z| <= 1")
        arg = x * (z - 1)
        if arg == 0:
            return 1.0
        _usable_or_raise(p, arg)
        wp = WrightParams(((p.gamma1, 1.0), (p.gamma2, 1.0)), ((1.0, p.alpha1), (1.0, p.alpha2)))
        rep = sf.gen_wright(wp, arg, ctl)
        return rep.value / (math.gamma(p.gamma1) * math.gamma(p.gamma2))
    raise ValueError(f"unknown statistic {what!r}")


def psi_moments(alpha: float, gamma: float, t: float) -> tuple[float, float]:
    """Mean and variance of the time change ``psi_{alpha,gamma}(t)``."""
    _check_unit("alpha", alpha)
    _check_unit("gamma", gamma)
    if t < 0:
        raise DomainError("time must be non-negative")
    mean = gamma * t ** alpha / math.gamma(alpha + 1)
    var = ((gamma + 1) / math.gamma(2 * alpha + 1) - gamma / math.gamma(alpha + 1) ** 2) \
        * gamma * t ** (2 * alpha)
    return mean, var
