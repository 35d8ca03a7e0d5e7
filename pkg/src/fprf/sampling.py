"""Random generation for the fields and time changes, plus empirical estimators."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic import FieldParams, QuadrantPoint
from .errors import DomainError
from .gpp import GppParams, gen_field_pmf

__all__ = [
    "RngStream", "PointPattern", "sample_stable_unit", "sample_inverse_stable",
    "sample_inverse_stable_pair", "sample_reflecting_bm", "sample_prf", "sample_fprf",
    "sample_fprf_pair", "sample_gpp", "empirical_pmf", "frac_integral_of_field",
    "frac_integral_exact", "write_pattern_csv", "read_pattern_csv", "write_counts_csv",
    "read_counts_csv",
]


@dataclass
class RngStream:
    """Reproducible generator keyed by ``(seed, stream_id)``.

    Distinct stream ids are spawned children of the same root seed and so
    give statistically independent streams.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        self.generator = np.random.default_rng(ss)

    def child(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)


@dataclass
class PointPattern:
    """Points in the rectangle ``[0, t1] x [0, t2]``."""

    bounds: QuadrantPoint
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if pts.size and (pts.min() < 0 or pts[:, 0].max() > self.bounds.t1
                         or pts[:, 1].max() > self.bounds.t2):
            raise DomainError("points must lie inside the bounds")
        self.points = pts

    def __len__(self):
        return len(self.points)

    def count_below(self, at: QuadrantPoint) -> int:
        """Number of points in ``[0, at.t1] x [0, at.t2]``."""
        p = self.points
        return int(np.count_nonzero((p[:, 0] <= at.t1) & (p[:, 1] <= at.t2)))


def _kanter_a(nu, u):
    return (np.sin(nu * u) / np.sin(u)) ** (1 / (1 - nu)) * np.sin((1 - nu) * u) / np.sin(nu * u)


def sample_stable_unit(nu: float, s: RngStream, size=None):
    """Draws of ``S_nu(1)`` with Laplace transform ``exp(-z^nu)`` (Kanter's representation)."""
    if not 0 < nu < 1:
        raise DomainError("stable index must lie in (0, 1)")
    g = s.generator
    u = g.uniform(0.0, np.pi, size)
    e = g.standard_exponential(size)
    return (_kanter_a(nu, u) / e) ** ((1 - nu) / nu)


def sample_inverse_stable(nu: float, t: float, s: RngStream, size=None):
    """Draws of ``L_nu(t)`` via ``L_nu(t) = (t / S_nu(1))^nu`` in law."""
    if not 0 < nu <= 1:
        raise DomainError("order must lie in (0, 1]")
    if t < 0:
        raise DomainError("time must be non-negative")
    if nu == 1:
        return t if size is None else np.full(size, float(t))
    return (t / sample_stable_unit(nu, s, size)) ** nu


def sample_inverse_stable_pair(nu: float, ta: float, tb: float, s: RngStream, size: int,
                               step: float = 1e-3, block: int = 256):
    """Joint draws of ``(L_nu(ta), L_nu(tb))`` from one subordinator path.

    The stable subordinator is discretised with operational-time step
    ``step``; each inverse time is the first grid time whose subordinator
    value exceeds the level, so the bias is at most ``step``.
    """
    if not 0 < ta <= tb:
        raise DomainError("need 0 < ta <= tb")
    if nu == 1:
        return np.full(size, float(ta)), np.full(size, float(tb))
    la = np.full(size, np.nan)
    lb = np.full(size, np.nan)
    level = np.zeros(size)
    active = np.arange(size)
    n0 = 0
    scale = step ** (1 / nu)
    while active.size:
        inc = scale * sample_stable_unit(nu, s, (active.size, block))
        path = level[active, None] + np.cumsum(inc, axis=1)
        times = (n0 + 1 + np.arange(block)) * step
        for lev, out in ((ta, la), (tb, lb)):
            todo = np.isnan(out[active])
            hit = path > lev
            first = np.argmax(hit, axis=1)
            got = todo & hit.any(axis=1)
            out[active[got]] = times[first[got]]
        level[active] = path[:, -1]
        active = active[np.isnan(lb[active])]
        n0 += block
    return la, lb


def sample_reflecting_bm(t: float, s: RngStream, size=None):
    """``|B(t)|`` for a Brownian motion whose increments have variance ``2t``."""
    if t < 0:
        raise DomainError("time must be non-negative")
    return np.abs(s.generator.normal(0.0, math.sqrt(2 * t), size))


def sample_prf(lam: float, bounds: QuadrantPoint, s: RngStream) -> PointPattern:
    """Planar Poisson field of rate ``lam`` on ``[0, t1] x [0, t2]``."""
    if not lam > 0:
        raise DomainError("rate must be positive")
    g = s.generator
    n = g.poisson(lam * bounds.t1 * bounds.t2)
    pts = np.column_stack((g.uniform(0, bounds.t1, n), g.uniform(0, bounds.t2, n)))
    return PointPattern(bounds, pts)


def sample_fprf(p: FieldParams, at: QuadrantPoint, s: RngStream, size=None):
    """Counts ``N(L_nu1(t1) , L_nu2(t2))`` of the planar field at inverse stable times."""
    u1 = sample_inverse_stable(p.nu1, at.t1, s, size)
    u2 = sample_inverse_stable(p.nu2, at.t2, s, size)
    return s.generator.poisson(p.lam * np.asarray(u1) * np.asarray(u2))


def sample_fprf_pair(p: FieldParams, tau: QuadrantPoint, t: QuadrantPoint, s: RngStream,
                     size: int, step: float = 1e-3):
    """Coupled counts at ``tau <= t`` under one pair of subordinator paths."""
    if not tau.precedes(t) or tau.t1 <= 0 or tau.t2 <= 0:
        raise DomainError("need 0 < tau <= t componentwise")
    a1, b1 = sample_inverse_stable_pair(p.nu1, tau.t1, t.t1, s, size, step)
    a2, b2 = sample_inverse_stable_pair(p.nu2, tau.t2, t.t2, s, size, step)
    g = s.generator
    inner = g.poisson(p.lam * a1 * a2)
    outer = inner + g.poisson(p.lam * (b1 * b2 - a1 * a2))
    return inner, outer


def _gpp_table(p: GppParams, t: float, tail: float = 1e-12, kmax: int = 100000):
    probs = []
    total = 0.0
    k = 0
    while True:
        q = max(gen_field_pmf(p, t, k).value, 0.0)
        probs.append(q)
        total += q
        k += 1
        if 1.0 - total < tail and q < tail:
            break
        if k > kmax:
            raise DomainError("GPP pmf tail did not fall below the cap")
    cdf = np.cumsum(probs)
    return cdf / cdf[-1]


def sample_gpp(p: GppParams, t: float, s: RngStream, size=None):
    """GPP counts at time ``t`` by inverse cdf over the analytic pmf."""
    if t < 0:
        raise DomainError("time must be non-negative")
    cdf = _gpp_table(p, t)
    u = s.generator.uniform(size=size)
    return np.searchsorted(cdf, u, side="right")


def empirical_pmf(samples) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies of ``0..max(samples)`` and their binomial standard errors."""
    x = np.asarray(samples, dtype=int).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    if x.min() < 0:
        raise DomainError("counts must be non-negative")
    f = np.bincount(x) / x.size
    return f, np.sqrt(f * (1 - f) / x.size)


# ---------------------------------------------------------------- fractional integral

def _weight_above(order, t, panels, x):
    """Product-integration weight of ``(t - tau)^{order-1} / Gamma(order)`` over the panels
    whose midpoint lies at or beyond ``x``.

    The per-panel weights telescope, so the tail sum is the kernel integral from
    the lower edge of the first such panel.
    """
    h = t / panels
    first = np.clip(np.ceil(np.asarray(x) / h - 0.5), 0, panels)
    return np.clip(t - first * h, 0.0, None) ** order / math.gamma(order + 1)


def _snap_bound(order, t, panels, x):
    """Bound on the error of :func:`_weight_above`: the weight of the panel holding ``x``."""
    h = t / panels
    a = np.floor(np.asarray(x) / h) * h
    k = lambda u: np.clip(u, 0.0, None) ** order / math.gamma(order + 1)
    return np.where(np.asarray(x) < t, k(t - a) - k(t - a - h), 0.0)


def frac_integral_of_field(pat: PointPattern, alpha1: float, alpha2: float,
                           at: QuadrantPoint, panels: int = 64, rtol: float = 1e-4,
                           max_panels: int = 2 ** 20) -> float:
    """Riemann-Liouville integral of the rectangle-count surface of a pattern.

    ``(G(a1) G(a2))^{-1} int int (t1 - s1)^{a1-1} (t2 - s2)^{a2-1} N(s1, s2) ds``
    on a tensor grid: the count is frozen at panel midpoints and the kernel
    is integrated exactly over each panel, which keeps the endpoint
    singularity out of the sampled values.  Panels double until the
    relative change stays below ``rtol`` for two doublings and the snapping
    error bound is below ``rtol`` relative.
    """
    if panels < 64:
        raise DomainError("at least 64 panels are required")
    if not (alpha1 > 0 and alpha2 > 0):
        raise DomainError("integration orders must be positive")
    if at.t1 > pat.bounds.t1 or at.t2 > pat.bounds.t2:
        raise DomainError("evaluation point outside the pattern bounds")
    pts = pat.points
    if len(pts) == 0:
        return 0.0
    prev, calm = None, 0
    while True:
        w1 = _weight_above(alpha1, at.t1, panels, pts[:, 0])
        w2 = _weight_above(alpha2, at.t2, panels, pts[:, 1])
        val = float(np.sum(w1 * w2))
        d1 = _snap_bound(alpha1, at.t1, panels, pts[:, 0])
        d2 = _snap_bound(alpha2, at.t2, panels, pts[:, 1])
        bound = float(np.sum(d1 * w2 + w1 * d2 + d1 * d2))
        # two quiet doublings in a row guard against an accidental small change; the
        # snapping bound guards against a point that sits still next to a panel edge
        quiet = prev is not None and abs(val - prev) <= rtol * abs(val)
        calm = calm + 1 if quiet else 0
        if (calm >= 2 and bound <= rtol * abs(val)) or panels >= max_panels:
            return val
        prev = val
        panels *= 2


def frac_integral_exact(pat: PointPattern, alpha1: float, alpha2: float, at: QuadrantPoint) -> float:
    """Closed form ``sum_i prod_j (t_j - x_ij)_+^{a_j} / Gamma(a_j + 1)`` of the same integral."""
    pts = pat.points
    d1 = np.clip(at.t1 - pts[:, 0], 0.0, None)
    d2 = np.clip(at.t2 - pts[:, 1], 0.0, None)
    inside = (pts[:, 0] <= at.t1) & (pts[:, 1] <= at.t2)
    vals = d1 ** alpha1 * d2 ** alpha2 / (math.gamma(alpha1 + 1) * math.gamma(alpha2 + 1))
    return float(np.sum(np.where(inside, vals, 0.0)))


# ---------------------------------------------------------------- CSV exchange

def write_pattern_csv(pat: PointPattern, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y"])
        for x, y in pat.points:
            w.writerow([repr(float(x)), repr(float(y))])


def read_pattern_csv(path, bounds: QuadrantPoint) -> PointPattern:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    pts = np.array([[float(r["x"]), float(r["y"])] for r in rows]).reshape(-1, 2)
    return PointPattern(bounds, pts)


def write_counts_csv(counts, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_index", "k"])
        for i, k in enumerate(np.asarray(counts, dtype=int).ravel()):
            w.writerow([i, int(k)])


def read_counts_csv(path) -> np.ndarray:
    with open(Path(path), newline="", encoding="utf-8") as fh:
        return np.array([int(r["k"]) for r in csv.DictReader(fh)], dtype=int)
