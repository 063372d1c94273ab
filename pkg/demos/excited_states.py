"""Excited and odd bound states: node counts, frequencies, energies.

Run: python3 demos/excited_states.py
"""
from sn1d.errors import NoBracket, NonConvergent
from sn1d.shooting import find_state, rescale_state

print("parity k  nodes  param        N(omega=1)   E(omega=1)   virial")
for parity in ("even", "odd"):
    for k in range(4):
        try:
            s = find_state(parity, k, gamma=1.0)
        except (NoBracket, NonConvergent) as exc:
            print(f"{parity:5s} {k}  skipped: {exc}")
            continue
        r = rescale_state(s, omega=1.0)
        print(f"{parity:5s} {k}  {s.full_line_nodes:5d}  {s.shoot_param:.8f}  "
              f"{r.breakdown.N:.8f}  {r.breakdown.E:.8f}  {s.virial_residual:.1e}")

# at equal mass the odd state sits above the ground state
g = find_state("even", 0)
o = rescale_state(find_state("odd", 0), N=g.breakdown.N)
print("equal-N energies: even", g.breakdown.E, " odd", o.breakdown.E)
