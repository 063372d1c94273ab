"""Time evolution: the bound state only rotates its phase, a Gaussian breathes.

Run: python3 demos/dynamics.py
"""
import numpy as np

from sn1d.dynamics import default_grid, evolve, mass_drift, energy_drift, position_variance
from sn1d.field_core import Field, resample
from sn1d.shooting import find_state

grid = default_grid()
s = find_state("even", 0)
u0 = resample(s.profile, grid)
u, obs = evolve(u0, t_final=2.0, dt=1e-3, sample_every=200)
phase = obs.unwrapped_phase()
print("bound state, omega =", s.omega)
for t, dev, ph in zip(obs.times, obs.profile_deviation, phase):
    print(f"  t={t:4.1f}  max||u|-|u0||={dev:.2e}  phase={ph:+.5f}  -omega t={-s.omega * t:+.5f}")
print("mass drift", mass_drift(obs), " energy drift", energy_drift(obs))

g0 = Field(grid, np.exp(-grid.x**2).astype(complex))
u, obs = evolve(g0, t_final=3.0, dt=1e-3, sample_every=500)
print("gaussian start: position variance", position_variance(g0), "->", position_variance(u))
print("mass drift", mass_drift(obs), " energy drift", energy_drift(obs))
