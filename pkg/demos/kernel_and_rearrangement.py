"""The |x| kernel form is positive on densities and negative on zero-mass signed functions.
Symmetric decreasing rearrangement lowers kinetic energy and the |x| term.

Run: python3 demos/kernel_and_rearrangement.py
"""
import numpy as np

from sn1d.field_core import Field, integrate, symmetric_grid
from sn1d.functionals import (
    kernel_quadratic_form,
    kinetic_energy,
    potential_functional,
    symmetric_decreasing_rearrangement,
)
from sn1d.validation import indicator_difference

g = symmetric_grid(6.0, 2401)
print("Q[1_[0,1] - 1_[1,2]] =", kernel_quadratic_form(indicator_difference(g)))

rng = np.random.default_rng(3)
bump = Field(g, np.exp(-(g.x - 1.5) ** 2))
print("Q[bump] =", kernel_quadratic_form(bump), "(positive densities give a positive value)")

negs = 0
for _ in range(200):
    c = rng.normal(size=4)
    centers = rng.uniform(-3, 3, size=4)
    f = sum(ci * np.exp(-(g.x - xi) ** 2) for ci, xi in zip(c, centers))
    gauss = np.exp(-g.x**2)
    f = f - integrate(Field(g, f)) / integrate(Field(g, gauss)) * gauss
    negs += kernel_quadratic_form(Field(g, f)) < -1e-12
print("zero-mass random trials with Q < 0:", negs, "of 200")

u = Field(g, np.exp(-(g.x - 2) ** 2) + 0.7 * np.exp(-2 * (g.x + 1.5) ** 2))
r = symmetric_decreasing_rearrangement(u)
print(f"T: {kinetic_energy(u):.6f} -> {kinetic_energy(r):.6f}")
print(f"V: {potential_functional(u):.6f} -> {potential_functional(r):.6f}")
