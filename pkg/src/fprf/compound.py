"""Compound fields: random sums of i.i.d. jumps indexed by a field count."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun as sf
from .analytic import FieldParams, QuadrantPoint, pmf_vector
from .errors import DomainError, TruncationInfeasible
from .gpp import GppParams
from .sampling import RngStream, sample_fprf
from .specfun import DEFAULT_CONTROL, SeriesControl

__all__ = [
    "GridDistribution", "discretize_jumps", "point_mass_grid", "cfprf_distribution",
    "sample_cfprf", "generic_compound_cdf", "grid_fold_cdf", "gen_compound_cf",
    "write_grid_csv", "read_grid_csv", "MAX_FOLDS",
]

MAX_FOLDS = 256
MASS_TOL = 1e-8


@dataclass(frozen=True)
class GridDistribution:
    """Law on the lattice ``origin + i * step`` with a separate atom at zero.

    For ``kind="density"`` the masses are density values, so node ``i``
    carries probability ``step * masses[i]``.  For ``kind="cdf"`` they are
    cdf values at the nodes, the atom already included.
    """

    origin: float
    step: float
    masses: np.ndarray = field(repr=False)
    atom_at_zero: float = 0.0
    kind: str = "density"

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "masses", m)
        if not self.step > 0:
            raise DomainError("grid step must be positive")
        if not 0 <= self.atom_at_zero <= 1:
            raise DomainError("atom at zero must lie in [0, 1]")
        if self.kind not in ("density", "cdf"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.kind == "density" and np.any(m < 0):
            raise DomainError("density values must be non-negative")
        if self.kind == "cdf" and np.any(np.diff(m) < -MASS_TOL):
            raise DomainError("cdf values must be non-decreasing")

    @property
    def nodes(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.masses.size)

    def total_mass(self) -> float:
        if self.kind == "cdf":
            return float(self.masses[-1]) if self.masses.size else self.atom_at_zero
        return self.atom_at_zero + self.step * math.fsum(self.masses)

    def cdf(self) -> "GridDistribution":
        """Cumulative grid: node masses summed, plus the zero atom from ``0`` on."""
        if self.kind == "cdf":
            return self
        c = np.cumsum(self.step * self.masses)
        c = c + self.atom_at_zero * (self.nodes >= 0)
        return GridDistribution(self.origin, self.step, np.minimum(c, 1.0), self.atom_at_zero, "cdf")

    def cdf_at(self, y) -> np.ndarray:
        """Step-function cdf ``Pr{Y <= y}`` read off the grid."""
        c = self.cdf().masses
        y = np.asarray(y, dtype=float)
        idx = np.floor((y - self.origin) / self.step + 1e-9).astype(int)
        inside = np.clip(idx, 0, c.size - 1)
        below = self.atom_at_zero * (y >= 0)
        return np.where(idx < 0, below, np.where(idx >= c.size, c[-1], c[inside]))


def discretize_jumps(cdf, step: float, upper: float) -> GridDistribution:
    """Grid density of a non-negative jump law by rounding to the nearest node.

    Node ``i`` receives ``F((i + 1/2) step) - F((i - 1/2) step)``; the mass
    beyond ``upper`` is dropped.
    """
    if upper <= 0:
        raise DomainError("upper limit must be positive")
    n = int(math.ceil(upper / step)) + 1
    edges = (np.arange(n + 1) - 0.5) * step
    F = np.asarray(cdf(np.clip(edges, 0.0, None)), dtype=float)
    F[0] = 0.0
    return GridDistribution(0.0, step, np.diff(F) / step)


def point_mass_grid(value: float, step: float, upper: float | None = None) -> GridDistribution:
    """Jump law concentrated at ``value`` (rounded to the nearest node)."""
    if value < 0:
        raise DomainError("jumps must be non-negative")
    i = int(round(value / step))
    n = max(i, int(math.ceil((upper or value) / step))) + 1
    m = np.zeros(n)
    m[i] = 1.0 / step
    return GridDistribution(0.0, step, m)


def _check_jumps(jumps: GridDistribution):
    if jumps.kind != "density":
        raise DomainError("jump law must be a density grid")
    if jumps.origin != 0:
        raise DomainError("jump grids must start at 0 (non-negative jumps)")
    if abs(jumps.total_mass() - 1.0) > 1e-6:
        raise DomainError("jump grid is not normalised")


def _count_pmf(p: FieldParams, at: QuadrantPoint, eps_tail: float, ctl) -> np.ndarray:
    """Count pmf up to the first ``K`` with ``sum_{k > K} pmf < eps_tail``."""
    kmax = 16
    while True:
        q = np.clip(pmf_vector(p, at, kmax, ctl), 0.0, None)
        c = np.cumsum(q)
        hit = np.nonzero(1.0 - c < eps_tail)[0]
        if hit.size:
            return q[: hit[0] + 1]
        if kmax >= MAX_FOLDS:
            raise TruncationInfeasible(f"count tail above {eps_tail:g} after {MAX_FOLDS} folds")
        kmax = min(2 * kmax, MAX_FOLDS)


def _folds(jumps: GridDistribution, kmax: int):
    """Density grids of ``Z_1 + ... + Z_k`` for ``k = 1..kmax`` truncated to the jump grid."""
    n = jumps.masses.size
    cur = jumps.masses.copy()
    yield cur
    for _ in range(kmax - 1):
        cur = np.convolve(cur, jumps.masses)[:n] * jumps.step
        yield cur


def cfprf_distribution(p: FieldParams, jumps: GridDistribution, at: QuadrantPoint,
                       eps_tail: float = 1e-10,
                       ctl: SeriesControl = DEFAULT_CONTROL) -> GridDistribution:
    """Law of the compound field ``sum_{i <= N(t1, t2)} Z_i`` on the jump grid.

    The atom at zero is ``pmf(0)`` and the density is
    ``sum_{k >= 1} pmf(k) f_Z^{*k}`` with ``K`` chosen so that the dropped
    count tail is below ``eps_tail``.  Use :meth:`GridDistribution.cdf` for
    the cumulative grid.
    """
    if not 0 < eps_tail <= 1e-3:
        raise DomainError("eps_tail must lie in (0, 1e-3]")
    _check_jumps(jumps)
    q = _count_pmf(p, at, eps_tail, ctl)
    dens = np.zeros_like(jumps.masses)
    if q.size > 1:
        for k, fk in enumerate(_folds(jumps, q.size - 1), start=1):
            dens += q[k] * fk
    return GridDistribution(0.0, jumps.step, dens, float(q[0]), "density")


def grid_fold_cdf(jumps: GridDistribution):
    """``(k, y) -> F_Z^{*k}(y)`` from repeated grid convolutions, kept per ``k``."""
    _check_jumps(jumps)

    grids = [None, GridDistribution(0.0, jumps.step, jumps.masses)]

    def evaluate(k, y):
        k = int(k)
        while len(grids) <= k:
            dens = np.convolve(grids[-1].masses, jumps.masses)[: jumps.masses.size] * jumps.step
            grids.append(GridDistribution(0.0, jumps.step, dens))
        return float(grids[k].cdf_at(y))

    return evaluate


def generic_compound_cdf(pmf_provider, Fz_evaluator, y: float, eps_tail: float = 1e-10,
                         kmax: int = 10000) -> float:
    """``Pr{N = 0} H(y) + sum_{k >= 1} Pr{N = k} F_Z^{*k}(y)`` for any count law.

    ``pmf_provider(k)`` returns ``Pr{N = k}`` and ``Fz_evaluator(k, y)`` the
    ``k``-fold jump cdf.  Terms are added until the remaining count mass is
    below ``eps_tail``.
    """
    q0 = float(pmf_provider(0))
    terms = [q0 * (1.0 if y >= 0 else 0.0)]
    seen = [q0]
    k = 0
    while 1.0 - math.fsum(seen) >= eps_tail:
        k += 1
        if k > kmax:
            raise TruncationInfeasible(f"count tail above {eps_tail:g} after {kmax} terms")
        q = max(float(pmf_provider(k)), 0.0)
        seen.append(q)
        if q > 0:
            terms.append(q * Fz_evaluator(k, y))
    return math.fsum(terms)


def sample_cfprf(p: FieldParams, jump_sampler, at: QuadrantPoint, s: RngStream,
                 size: int = 1) -> np.ndarray:
    """Draws of the compound field; ``jump_sampler(generator, n)`` returns ``n`` jumps."""
    k = np.asarray(sample_fprf(p, at, s, size), dtype=int).reshape(size)
    total = int(k.sum())
    z = np.asarray(jump_sampler(s.generator, total), dtype=float).reshape(total)
    return np.bincount(np.repeat(np.arange(size), k), weights=z, minlength=size)


def gen_compound_cf(p: GppParams, measure: float, phi_u: complex,
                    ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """``E^gamma_{alpha,1}(-(1 - phi(u)) lam |B|^alpha)``, the compound characteristic function."""
    phi_u = complex(phi_u)
    if abs(phi_u) > 1 + 1e-12:
        raise DomainError("|phi(u)| must not exceed 1")
    if measure < 0:
        raise DomainError("measure must be non-negative")
    z = -(1 - phi_u) * p.lam * measure ** p.alpha
    return sf.mittag_leffler_complex(p.alpha, 1.0, p.gamma, z, ctl).value


def write_grid_csv(g: GridDistribution, path) -> None:
    """CSV ``y,cdf,density`` after a ``#`` line holding the JSON header."""
    dens = g if g.kind == "density" else None
    cdf = g.cdf()
    head = {"schema": 1, "origin": g.origin, "step": g.step, "atom_at_zero": g.atom_at_zero,
            "kind": g.kind}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(head) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y", "cdf", "density"])
        for i, y in enumerate(g.nodes):
            d = repr(float(dens.masses[i])) if dens is not None else ""
            w.writerow([repr(float(y)), repr(float(cdf.masses[i])), d])


def read_grid_csv(path) -> GridDistribution:
    with open(path, newline="", encoding="utf-8") as fh:
        head = json.loads(fh.readline()[1:])
        rows = list(csv.DictReader(fh))
    col = "density" if head["kind"] == "density" else "cdf"
    m = np.array([float(r[col]) for r in rows])
    return GridDistribution(head["origin"], head["step"], m, head["atom_at_zero"], head["kind"])
