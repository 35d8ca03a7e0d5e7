"""State probabilities of the fractional field against simulation.

Prints the analytic pmf next to the empirical frequencies of time-changed
Poisson samples, for a few fractional orders.
"""
import numpy as np

from fprf import analytic as an
from fprf import sampling as sm
from fprf.analytic import FieldParams, QuadrantPoint

at = QuadrantPoint(1.0, 1.0)
n = 100_000

for nu in [(1.0, 1.0), (0.8, 0.8), (0.6, 0.9)]:
    p = FieldParams(1.0, *nu)
    q = an.pmf_vector(p, at, 8)
    f, se = sm.empirical_pmf(sm.sample_fprf(p, at, sm.RngStream(1), n))
    f = np.pad(f, (0, max(0, 8 - f.size)))[:8]
    mean, var = an.moments(p, at)
    print(f"nu = {nu}  mean {mean:.4f}  variance {var:.4f}  regime {an.pmf(p, 1, at).regime}")
    for k in range(8):
        print(f"  k={k}  pmf {q[k]:.6f}  empirical {f[k]:.6f}")
