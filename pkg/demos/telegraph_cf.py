"""Characteristic function of the telegraph motion, plain and time-changed."""
import numpy as np

from fprf import motion as mo
from fprf.motion import MotionParams
from fprf.sampling import RngStream

m = MotionParams(lam=2.0, v=1.0, t=1.0)
x = mo.simulate_linear(m, s=RngStream(5), size=100_000)
xt = mo.simulate_linear(m, "reflecting_bm", RngStream(6), 100_000)

print(" eta   exact    empirical  tc-exact  tc-empirical")
for eta in (0.5, 1.0, 2.0, 5.0):
    exact = mo.linear_cf(m, eta)
    tc = mo.linear_cf_timechanged(0.5, 1.0, m, eta)
    print(f"{eta:4.1f}  {exact:+.4f}  {np.cos(eta * x).mean():+.4f}    "
          f"{tc:+.4f}   {np.cos(eta * xt).mean():+.4f}")
