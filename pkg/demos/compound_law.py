"""Compound field with exponential jumps: grid law, atom at zero and a Monte-Carlo check."""
import numpy as np

from fprf import compound as cp
from fprf.analytic import FieldParams, QuadrantPoint
from fprf.sampling import RngStream

p, at = FieldParams(1.0, 0.8, 0.8), QuadrantPoint(1.0, 1.0)
jumps = cp.discretize_jumps(lambda y: 1 - np.exp(-np.asarray(y)), 2e-3, 30.0)
law = cp.cfprf_distribution(p, jumps, at)
y = cp.sample_cfprf(p, lambda g, n: g.exponential(1.0, n), at, RngStream(3), 100_000)

print(f"atom at zero {law.atom_at_zero:.6f}  total mass {law.total_mass():.8f}")
for v in (0.5, 1.0, 2.0, 4.0):
    print(f"P(Y <= {v}):  grid {float(law.cdf_at(v)):.5f}  simulated {np.mean(y <= v):.5f}")
