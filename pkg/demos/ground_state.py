"""Find the nodeless bound state by shooting and look at its bookkeeping.

Run: python3 demos/ground_state.py
"""
import numpy as np

from sn1d.functionals import energy_ratio, virial_residual
from sn1d.shooting import find_state, rescale_state

s = find_state("even", 0, gamma=1.0)
b = s.breakdown
print("central amplitude a* =", s.shoot_param)
print("omega =", s.omega, " N =", b.N, " E =", b.E)

# kinetic, potential and omega*N pieces line up at 1 : 4 : 5 (up to factors)
print("4 omega N =", 4 * s.omega * b.N)
print("20 T      =", 20 * b.T)
print("5 V       =", 5 * b.Vfunc)
print("virial residual", virial_residual(b), " E/(omega N) =", energy_ratio(b))

# the profile is one hump; print a coarse picture
x, phi = s.profile.x, s.profile.values
for xi in np.arange(0, 8.01, 1.0):
    v = np.interp(xi, x, phi)
    print(f"x={xi:4.1f}  phi={v:.5f}  " + "#" * int(40 * v / phi.max()))

# one state gives all the others by rescaling
for om in (0.5, 1.0, 4.0):
    r = rescale_state(s, omega=om)
    print(f"omega={om:4.1f}  N={r.breakdown.N:.6f}  N/omega^1.5={r.breakdown.N / om**1.5:.6f}")
