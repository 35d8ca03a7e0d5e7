"""Finite-velocity random motions switching direction on Poisson or GPP epochs.

The linear motion is the telegraph process on the real line; the planar
motion picks a uniform new direction at each switch.  Time-changed
versions run the motion on the clock ``psi_{alpha,gamma}(t)``.
"""

from __future__ import annotations

import cmath
import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special, stats

from . import specfun as sf
from .analytic import _upper
from .errors import DomainError, NumericError, QuadratureError
from .sampling import RngStream, sample_inverse_stable, sample_reflecting_bm
from .specfun import DEFAULT_CONTROL, SeriesControl, WrightParams

__all__ = [
    "MotionParams", "PlanarSample", "CircleAtom", "linear_cf", "linear_cf_real_branch",
    "linear_cf_timechanged", "simulate_linear", "planar_cond_cf", "planar_cond_density",
    "frac_planar_cond_cf", "frac_planar_cond_density", "planar_cf", "frac_planar_cf",
    "simulate_planar",
    "write_linear_csv", "write_planar_csv",
]

IMAG_TOL = 1e-10


@dataclass(frozen=True)
class MotionParams:
    lam: float
    v: float
    t: float

    def __post_init__(self):
        if not (self.lam > 0 and self.v > 0):
            raise DomainError("switch rate and speed must be positive")
        if self.t < 0:
            raise DomainError("horizon must be non-negative")


@dataclass(frozen=True)
class PlanarSample:
    """Endpoints ``(n, 2)`` with the switch count of each path."""

    position: np.ndarray
    switches: np.ndarray


@dataclass(frozen=True)
class CircleAtom:
    """Law concentrated on the circle of the given radius (no switches)."""

    radius: float


def _real(z: complex) -> float:
    if abs(z.imag) > IMAG_TOL * max(1.0, abs(z.real)):
        raise NumericError(f"imaginary residual {z.imag:.3g} exceeds tolerance")
    return z.real


# ---------------------------------------------------------------- linear motion

def linear_cf(m: MotionParams, eta: float) -> float:
    """``E exp(i eta X(t)) = exp(-lam t) (cosh(D t) + lam / D sinh(D t))``, ``D = sqrt(lam^2 - eta^2 v^2)``.

    ``D`` is taken as a complex square root, so the same expression covers
    the oscillating regime ``eta v > lam``.
    """
    lam, t = m.lam, m.t
    D = cmath.sqrt(lam * lam - (eta * m.v) ** 2)
    if abs(D) * t < 1e-8:
        return math.exp(-lam * t) * (1 + lam * t)
    val = cmath.exp(-lam * t) * (cmath.cosh(D * t) + lam / D * cmath.sinh(D * t))
    return _real(val)


def linear_cf_real_branch(m: MotionParams, eta: float) -> float:
    """Same characteristic function from real arithmetic on each side of ``eta v = lam``."""
    lam, t = m.lam, m.t
    d2 = lam * lam - (eta * m.v) ** 2
    if d2 > 0:
        D = math.sqrt(d2)
        return math.exp(-lam * t) * (math.cosh(D * t) + lam / D * math.sinh(D * t))
    if d2 < 0:
        W = math.sqrt(-d2)
        return math.exp(-lam * t) * (math.cos(W * t) + lam / W * math.sin(W * t))
    return math.exp(-lam * t) * (1 + lam * t)


def _ml_c(alpha, beta, gamma, z, ctl):
    z = complex(z)
    if z.imag == 0:
        return complex(sf.mittag_leffler(alpha, beta, gamma, z.real, ctl).value)
    return sf.mittag_leffler_complex(alpha, beta, gamma, z, ctl).value


def linear_cf_timechanged(alpha: float, gamma: float, m: MotionParams, eta: float,
                          ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Characteristic function of the telegraph process run on ``psi_{alpha,gamma}(t)``.

    ``(E(-(lam-D)t^a) + E(-(lam+D)t^a)) / 2 + lam / (2D) (E(-(lam-D)t^a) - E(-(lam+D)t^a))``
    with ``E = E^gamma_{alpha,1}`` and ``D`` as in :func:`linear_cf`.
    """
    lam = m.lam
    ta = m.t ** alpha
    D = cmath.sqrt(lam * lam - (eta * m.v) ** 2)
    if abs(D) < 1e-7 * lam:
        # D -> 0: the divided difference becomes a derivative in the argument
        e0 = _ml_c(alpha, 1.0, gamma, -lam * ta, ctl)
        e1 = _ml_c(alpha, 1.0 + alpha, gamma + 1, -lam * ta, ctl)
        return _real(e0 + lam * ta * gamma * e1)
    em = _ml_c(alpha, 1.0, gamma, -(lam - D) * ta, ctl)
    ep = _ml_c(alpha, 1.0, gamma, -(lam + D) * ta, ctl)
    return _real(0.5 * (em + ep) + lam / (2 * D) * (em - ep))


def _effective_times(m: MotionParams, timechange, s: RngStream, size: int) -> np.ndarray:
    if timechange is None or timechange == "none":
        return np.full(size, float(m.t))
    if timechange == "reflecting_bm":
        return sample_reflecting_bm(m.t, s, size)
    kind, nu = timechange
    if kind != "inverse_stable":
        raise ValueError(f"unknown time change {timechange!r}")
    return np.asarray(sample_inverse_stable(nu, m.t, s, size), dtype=float)


def _grouped_switches(tau: np.ndarray, counts: np.ndarray, g: np.random.Generator):
    """Sorted uniform switch epochs for each path, flattened with group ids and ranks."""
    group = np.repeat(np.arange(tau.size), counts)
    times = g.uniform(size=group.size) * tau[group]
    order = np.lexsort((times, group))
    group, times = group[order], times[order]
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    rank = np.arange(group.size) - starts[group]
    return group, times, rank


def simulate_linear(m: MotionParams, timechange=None, s: RngStream | None = None,
                    size: int = 1, return_switches: bool = False):
    """Telegraph endpoints after the (possibly random) effective time.

    ``timechange`` is ``None``, ``"reflecting_bm"`` or ``("inverse_stable", nu)``.
    The start direction is a fair sign; switches arrive at rate ``lam``.
    """
    s = s or RngStream(0)
    g = s.generator
    tau = _effective_times(m, timechange, s, size)
    k = g.poisson(m.lam * tau)
    d0 = np.where(g.uniform(size=size) < 0.5, -1.0, 1.0)
    group, times, rank = _grouped_switches(tau, k, g)
    # X = d0 v ((-1)^K tau + 2 sum_j (-1)^(j-1) s_j) over sorted epochs s_1 < ... < s_K
    signed = np.where(rank % 2 == 0, 1.0, -1.0) * times
    inner = np.bincount(group, weights=signed, minlength=size)
    x = d0 * m.v * (np.where(k % 2 == 0, 1.0, -1.0) * tau + 2 * inner)
    return (x, k) if return_switches else x


# ---------------------------------------------------------------- planar motion

def planar_cond_cf(k: int, m: MotionParams, delta_norm: float) -> float:
    """``2^{k/2} Gamma(k/2+1) J_{k/2}(X) / X^{k/2}`` with ``X = v t |delta|``."""
    if k < 0 or delta_norm < 0:
        raise DomainError("need k >= 0 and |delta| >= 0")
    X = m.v * m.t * delta_norm
    if X == 0:
        return 1.0
    if X < 1:
        return float(_bessel_ratio(k / 2, X))
    nu = k / 2
    return math.exp(nu * math.log(2 / X) + math.lgamma(nu + 1)) * sf.bessel_j(nu, X)


def _bessel_ratio(nu, X):
    """``Gamma(nu+1) (2/X)^nu J_nu(X)``, through ``0F1`` below ``X = 1`` to avoid overflow."""
    X = np.asarray(X, dtype=float)
    small = X < 1
    Xs = np.where(small, 1.0, X)
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.exp(nu * np.log(2 / Xs) + math.lgamma(nu + 1)) * special.jv(nu, Xs)
    return np.where(small, special.hyp0f1(nu + 1, -X * X / 4), big)


def planar_cond_density(k: int, m: MotionParams, z_norm: float):
    """Density of the position given ``k`` switches, or a :class:`CircleAtom` for ``k = 0``."""
    if k < 0 or z_norm < 0:
        raise DomainError("need k >= 0 and |z| >= 0")
    R = m.v * m.t
    if k == 0:
        return CircleAtom(R)
    if z_norm >= R:
        return 0.0
    return k / (2 * math.pi * R ** k) * (R * R - z_norm * z_norm) ** (k / 2 - 1)


def _wright_route(alpha, gamma, k, X, ctl):
    wp = WrightParams(((gamma, 2.0),), ((k / 2 + 1, 1.0), (1.0, 2 * alpha)))
    rep = sf.gen_wright(wp, -X * X / 4, ctl)
    return math.exp(math.lgamma(k / 2 + 1) - math.lgamma(gamma)) * rep.value, rep


def _beta_kernel(alpha, gamma, y, ctl):
    """``sum Gamma(2n+gamma) (-y)^n / (Gamma(2n alpha + 1) Gamma(2n+1))``."""
    if y == 0:
        return math.gamma(gamma)
    wp = WrightParams(((gamma, 2.0), (1.0, 1.0)), ((1.0, 2 * alpha), (1.0, 2.0)))
    return sf.gen_wright(wp, -y, ctl).value


def _beta_route(alpha, gamma, k, X, ctl):
    a, b = -0.5, (k - 1) / 2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(lambda r: _beta_kernel(alpha, gamma, X * X * r, ctl), 0.0, 1.0,
                                  weight="alg", wvar=(a, b), epsabs=1e-13, epsrel=1e-11, limit=200)
    norm = special.beta(0.5, (k + 1) / 2) * math.gamma(gamma)
    return val / norm, err / norm


def _closed_route(alpha, gamma, k, X):
    if alpha == 1 and gamma == 1:
        return _bessel_ratio(k / 2, X)
    if alpha == 0.5 and gamma == 1:
        return special.hyp1f1(0.5, k / 2 + 1, -np.asarray(X, dtype=float) ** 2)
    return None


FRAC_ROUTES = ("auto", "wright_series", "beta_integral")


def frac_planar_cond_cf(alpha: float, gamma: float, k: int, m: MotionParams, delta_norm: float,
                        route: str = "auto", ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Conditional characteristic function of the planar motion on the clock ``psi_{alpha,gamma}``.

    ``wright_series`` sums ``Gamma(k/2+1)/Gamma(gamma) 1Psi2[(gamma,2); (k/2+1,1),(1,2 alpha) | -X^2/4]``
    with ``X = v |delta| t^alpha``; ``beta_integral`` averages the kernel
    ``sum Gamma(2n+gamma)(-X^2 r)^n / (Gamma(2n alpha+1) Gamma(2n+1))`` against
    the ``Beta(1/2, (k+1)/2)`` law in ``r``.  ``auto`` uses the Bessel
    closed form at ``alpha = gamma = 1``, the confluent hypergeometric form
    ``1F1(1/2; k/2+1; -X^2)`` at ``alpha = 1/2, gamma = 1`` and the Wright
    series otherwise.
    """
    if k < 0 or delta_norm < 0:
        raise DomainError("need k >= 0 and |delta| >= 0")
    if route not in FRAC_ROUTES:
        raise ValueError(f"unknown route {route!r}")
    X = m.v * delta_norm * m.t ** alpha
    if X == 0:
        return 1.0
    if route == "beta_integral":
        return _beta_route(alpha, gamma, k, X, ctl)[0]
    if route == "auto":
        closed = _closed_route(alpha, gamma, k, X)
        if closed is not None:
            return float(closed)
    return _wright_route(alpha, gamma, k, X, ctl)[0]


def _cf_on_grid(alpha, gamma, k, m, r, ctl):
    X = m.v * r * m.t ** alpha
    closed = _closed_route(alpha, gamma, k, X)
    if closed is not None:
        return closed
    out = np.empty_like(X)
    for i, x in enumerate(X):
        val, rep = _wright_route(alpha, gamma, k, x, ctl)
        if rep.precision_loss:
            raise QuadratureError("characteristic function lost precision in the Hankel tail")
        out[i] = val
    return out


_GL32 = np.polynomial.legendre.leggauss(32)


def _wynn_epsilon(partials) -> float:
    """Wynn's epsilon extrapolation of a sequence of partial sums (last even column)."""
    prev = np.zeros(len(partials) + 1)
    cur = np.asarray(partials, dtype=float)
    best = float(cur[-1])
    col = 0
    while cur.size > 1:
        d = np.diff(cur)
        if np.any(d == 0):
            break
        prev, cur = cur, prev[1:cur.size] + 1.0 / d
        col += 1
        if col % 2 == 0:
            if not np.isfinite(cur[-1]):
                break
            best = float(cur[-1])
    return best


def _hankel_density(alpha, gamma, k, m, z_norm, ctl, tol, max_panels, window):
    u, w = _GL32
    edges = np.concatenate(([0.0], special.jn_zeros(0, max_panels) / z_norm))
    # each panel also sees oscillations of Phi at frequency ~ v t^alpha
    freq = m.v * m.t ** alpha
    partial = []
    total = 0.0
    last = None
    for i in range(max_panels):
        lo, hi = edges[i], edges[i + 1]
        sub = max(1, int(math.ceil((hi - lo) * freq / math.pi)))
        cuts = np.linspace(lo, hi, sub + 1)
        for a, b in zip(cuts[:-1], cuts[1:]):
            r = 0.5 * (b - a) * u + 0.5 * (b + a)
            f = r * special.j0(r * z_norm) * _cf_on_grid(alpha, gamma, k, m, r, ctl)
            total += 0.5 * (b - a) * float(np.dot(w, f))
        partial.append(total)
        n = len(partial)
        if n >= window and n % 10 == 0:
            est = _wynn_epsilon(partial[-window:])
            if last is not None and abs(est - last) < tol * max(1.0, abs(est)):
                return est / (2 * math.pi)
            last = est
    raise QuadratureError("Hankel tail did not converge")


def _mixture_density(alpha, k, m, z_norm):
    """Conditional density averaged over the clock ``psi_{alpha,1}(1) ~ M_alpha``.

    Given the clock value ``y`` the position is the Poisson-time law on the
    disk of radius ``c y`` with ``c = v t^alpha``; no oscillatory integral
    is involved.
    """
    c = m.v * m.t ** alpha
    y0 = z_norm / c
    upper = _upper(alpha)
    if y0 >= upper:
        return 0.0
    if k == 0:
        return float(sf.m_wright(alpha, y0)[0]) / (2 * math.pi * z_norm * c)
    e = k / 2 - 1

    def g(y):
        return (float(sf.m_wright(alpha, y)[0]) * k / (2 * math.pi * (c * y) ** k)
                * (c * (y + y0)) ** e * c ** e)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(g, y0, upper, weight="alg", wvar=(e, 0.0),
                                epsabs=1e-13, epsrel=1e-10, limit=200)
    return val


DENSITY_ROUTES = ("auto", "hankel", "mixture")


def frac_planar_cond_density(alpha: float, gamma: float, k: int, m: MotionParams, z_norm: float,
                             ctl: SeriesControl = DEFAULT_CONTROL, route: str = "auto",
                             tol: float = 1e-7, max_panels: int = 2000, window: int = 30):
    """Density of the conditional position of the planar motion on the clock ``psi_{alpha,gamma}``.

    ``hankel`` evaluates ``(1/2pi) int_0^inf r J0(r |z|) Phi(r) dr`` with
    ``Phi`` the conditional characteristic function, panel by panel between
    consecutive zeros of ``J0(r |z|)``; the panel partial sums alternate
    and are extrapolated with Wynn's epsilon algorithm.  ``mixture``
    (``gamma = 1`` only) averages the Poisson-time conditional density over
    the Mainardi law of the clock.  ``auto`` tries ``hankel`` and falls back
    to ``mixture`` when the characteristic function cannot be evaluated far
    enough into the tail.  At ``alpha = gamma = 1, k = 0`` the law is the
    circle atom.
    """
    if k < 0:
        raise DomainError("need k >= 0")
    if route not in DENSITY_ROUTES:
        raise ValueError(f"unknown route {route!r}")
    if alpha == 1 and gamma == 1 and k == 0:
        return CircleAtom(m.v * m.t)
    if z_norm <= 0:
        raise DomainError("density is evaluated at |z| > 0")
    can_mix = gamma == 1 and alpha < 1
    if route == "mixture":
        if not can_mix:
            raise DomainError("the mixture route needs gamma = 1 and alpha < 1")
        return _mixture_density(alpha, k, m, z_norm)
    try:
        return _hankel_density(alpha, gamma, k, m, z_norm, ctl, tol, max_panels, window)
    except QuadratureError:
        if route == "auto" and can_mix:
            return _mixture_density(alpha, k, m, z_norm)
        raise


def planar_cf(m: MotionParams, delta_norm: float, tail: float = 1e-15) -> float:
    """Unconditional characteristic function of the planar position at time ``t``.

    The conditional forms ``0F1(; k/2+1; -X^2/4)`` mixed over the
    Poisson(``lam t``) switch count, truncated where the count tail drops
    below ``tail``.
    """
    if delta_norm < 0:
        raise DomainError("need |delta| >= 0")
    X = m.v * m.t * delta_norm
    if X == 0:
        return 1.0
    mu = m.lam * m.t
    k = np.arange(int(stats.poisson.isf(tail, mu)) + 2)
    return float(np.dot(stats.poisson.pmf(k, mu), special.hyp0f1(k / 2 + 1, -X * X / 4)))


def frac_planar_cf(alpha: float, m: MotionParams, delta_norm: float) -> float:
    """Unconditional characteristic function of the planar motion on the clock ``psi_{alpha,1}``.

    The clock at ``t`` is ``t^alpha Y`` with ``Y`` of Mainardi density
    ``M_alpha``, so the law is the Poisson-time law averaged over ``Y``.
    Mixing the clock-averaged conditional laws over the count pmf would
    not give this: count and clock are dependent.
    """
    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    if alpha == 1:
        return planar_cf(m, delta_norm)
    if delta_norm == 0:
        return 1.0
    scale = m.t ** alpha

    def f(y):
        return float(sf.m_wright(alpha, y)[0]) * planar_cf(MotionParams(m.lam, m.v, y * scale), delta_norm)

    val, _ = integrate.quad(f, 0.0, _upper(alpha), epsabs=1e-12, epsrel=1e-10, limit=400)
    return val


def simulate_planar(m: MotionParams, timechange=None, s: RngStream | None = None,
                    size: int = 1, condition_k: int | None = None) -> PlanarSample:
    """Endpoints of planar paths with uniform new directions at each switch.

    With ``condition_k`` every path has exactly that many switches, whose
    epochs are then uniform order statistics on the effective horizon.
    """
    s = s or RngStream(0)
    g = s.generator
    tau = _effective_times(m, timechange, s, size)
    if condition_k is None:
        k = g.poisson(m.lam * tau)
    else:
        if condition_k < 0:
            raise DomainError("condition_k must be non-negative")
        k = np.full(size, int(condition_k))
    group, times, rank = _grouped_switches(tau, k, g)
    # segment j of a path runs from epoch j to epoch j+1 (epoch 0 = 0, epoch K+1 = tau)
    seg_group = np.concatenate((np.arange(size), group))
    seg_start = np.concatenate((np.zeros(size), times))
    seg_rank = np.concatenate((np.zeros(size, dtype=int), rank + 1))
    order = np.lexsort((seg_rank, seg_group))
    seg_group, seg_start = seg_group[order], seg_start[order]
    seg_end = np.empty_like(seg_start)
    seg_end[:-1] = seg_start[1:]
    last = np.r_[seg_group[1:] != seg_group[:-1], True]
    seg_end[last] = tau[seg_group[last]]
    theta = g.uniform(0.0, 2 * np.pi, seg_group.size)
    dur = seg_end - seg_start
    x = np.bincount(seg_group, weights=dur * np.cos(theta), minlength=size)
    y = np.bincount(seg_group, weights=dur * np.sin(theta), minlength=size)
    return PlanarSample(m.v * np.column_stack((x, y)), k)


def write_linear_csv(x, k, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "k"])
        for xi, ki in zip(np.asarray(x, dtype=float), np.asarray(k, dtype=int)):
            w.writerow([repr(float(xi)), int(ki)])


def write_planar_csv(sample: PlanarSample, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "k"])
        for (xi, yi), ki in zip(sample.position, sample.switches):
            w.writerow([repr(float(xi)), repr(float(yi)), int(ki)])
