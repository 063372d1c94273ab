"""Constrained energy minimization compared with the shooting solution.

Run: python3 demos/minimize_vs_shoot.py
"""
import numpy as np

from sn1d.minimizer import MinimizeConfig, MinimizeHistory, minimize
from sn1d.shooting import find_state, rescale_state
from sn1d.validation import sup_distance

lam = 1.0
hist = MinimizeHistory()
m = minimize(MinimizeConfig(lam=lam), history=hist)
print(f"minimizer: {m.iterations} iterations, residual {m.residual:.2e}, E = {m.breakdown.E:.10f}")
for i in (0, 1, 2, 5, 10, len(hist.energy) - 1):
    if i < len(hist.energy):
        print(f"  iter {i:3d}  E={hist.energy[i]:.10f}  residual={hist.residual[i]:.2e}")

s = rescale_state(find_state("even", 0), N=lam)
print("shooting : E =", s.breakdown.E)
print("relative energy gap", abs(m.breakdown.E - s.breakdown.E) / s.breakdown.E)
print("sup distance of profiles", sup_distance(m.profile, s.profile))

# mass doubling multiplies the minimum energy by 2^(5/3)
m2 = minimize(MinimizeConfig(lam=2 * lam))
print("E(2N)/E(N) =", m2.breakdown.E / m.breakdown.E, " expected", 2 ** (5 / 3))

# the minimum restricted to odd functions
mo = minimize(MinimizeConfig(lam=lam, parity="odd"))
print("odd minimum", mo.breakdown.E, "vs free", m.breakdown.E,
      " odd profile nodes on x>0:", mo.node_count)
print("max |u(x)+u(-x)| for the odd run:", np.max(np.abs(mo.profile.values + mo.profile.values[::-1])))
