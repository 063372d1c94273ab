"""Conserved functionals, virial checks and rearrangement inequalities.

Conventions: ``Vfunc = 1/2 * iint |x-y| rho(x) rho(y)`` so that the energy
reads ``E = T + (gamma/2) * Vfunc``.  For a bound state of frequency omega,
``4 omega N = 20 T = 5 gamma Vfunc`` and hence ``E = 3/5 omega N``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AsymmetricInput, DegenerateState, NegativeInput
from .field_core import Field, integrate, signed_potential, stagger_matrix

SYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class EnergyBreakdown:
    N: float
    T: float
    Vfunc: float
    E: float
    gamma: float
    omega: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "T": self.T,
            "Vfunc": self.Vfunc,
            "E": self.E,
            "gamma": self.gamma,
            "omega": self.omega,
        }


def _rho(u: Field) -> np.ndarray:
    return u.density().values


def particle_number(u: Field) -> float:
    return float(np.dot(u.grid.weights, _rho(u)))


def kinetic_energy(u: Field) -> float:
    """integral |u_x|^2 from fourth-order staggered differences."""
    du = stagger_matrix(u.grid) @ u.values
    return float(u.grid.h * np.sum(du.real**2 + du.imag**2))


def potential_functional(u: Field, gamma: float = 1.0) -> float:
    """``1/2 iint |x-y| rho rho``, evaluated as ``integral V[rho] rho``.

    ``gamma`` does not enter the value; it is accepted so call sites can pass
    the coupling uniformly.
    """
    rho = _rho(u)
    v = signed_potential(u.grid, rho)
    return float(np.dot(u.grid.weights, v * rho))


def total_energy(u: Field, gamma: float = 1.0) -> EnergyBreakdown:
    n = particle_number(u)
    t = kinetic_energy(u)
    vf = potential_functional(u)
    omega = (t + gamma * vf) / n if n > 0 else None
    return EnergyBreakdown(N=n, T=t, Vfunc=vf, E=t + 0.5 * gamma * vf, gamma=gamma, omega=omega)


def virial_residual(s: EnergyBreakdown) -> float:
    """Largest pairwise relative gap among 4 omega N, 20 T, 5 gamma Vfunc."""
    if s.N <= 0 or s.omega is None:
        raise DegenerateState("virial residual needs N > 0")
    q = (4.0 * s.omega * s.N, 20.0 * s.T, 5.0 * s.gamma * s.Vfunc)
    worst = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            scale = max(abs(q[i]), abs(q[j]))
            if scale > 0:
                worst = max(worst, abs(q[i] - q[j]) / scale)
    return worst


def energy_ratio(s: EnergyBreakdown) -> float:
    """E / (omega N); equals 3/5 at a bound state."""
    if s.N <= 0 or s.omega is None:
        raise DegenerateState("energy ratio needs N > 0")
    return s.E / (s.omega * s.N)


def kernel_bilinear(f: Field, g: Field) -> float:
    """iint f(x) |x-y| g(y) dx dy for real samples of either sign."""
    return float(np.dot(f.grid.weights, f.values * 2.0 * signed_potential(g.grid, g.values)))


def kernel_quadratic_form(f: Field) -> float:
    """Q(f) = iint |x-y| f(x) f(y); indefinite on sign-changing f."""
    return kernel_bilinear(f, f)


def symmetric_decreasing_rearrangement(f: Field) -> Field:
    """Discrete symmetric decreasing rearrangement on a symmetric grid.

    Samples are sorted in decreasing order and laid out from the center
    outward, alternating right then left, so the sample multiset is kept
    exactly.  Ties are broken toward +x.
    """
    values = np.asarray(f.values)
    if np.iscomplexobj(values):
        raise NegativeInput("rearrangement needs a real nonnegative field")
    if values.min() < -1e-14:
        raise NegativeInput(f"rearrangement input has sample {values.min():g} < 0")
    c = f.grid.center
    n = f.grid.n
    order = np.empty(n, dtype=int)
    order[0] = c
    k = np.arange(1, (n - 1) // 2 + 1)
    order[1::2] = c + k
    order[2::2] = c - k
    out = np.empty(n)
    # stable sort on the negated values keeps tie order deterministic
    out[order] = values[np.argsort(-values, kind="stable")]
    return Field(f.grid, out)


def jensen_lower_bound(u: Field) -> float:
    """1/2 integral |integral (x-y) rho(y) dy| rho(x) dx, a lower bound on Vfunc."""
    rho = _rho(u)
    w = u.grid.weights
    mass = np.dot(w, rho)
    first = np.dot(w, u.grid.x * rho)
    return float(0.5 * np.dot(w, np.abs(u.grid.x * mass - first) * rho))


def shell_mass(u: Field) -> np.ndarray:
    """eta(x) = integral_{-|x|}^{|x|} rho, half-weighting the two shell nodes.

    This is the discrete form for which the symmetric-density identity
    below is exact.
    """
    rho = _rho(u)
    grid = u.grid
    c = grid.center
    w = grid.weights
    half = (w * rho)[c:]
    mirror = (w * rho)[c::-1]
    shell = half + mirror
    shell[0] = half[0]
    inside = np.concatenate(([0.0], np.cumsum(shell)[:-1]))
    eta_half = inside + 0.5 * shell
    return np.concatenate((eta_half[:0:-1], eta_half))


def symmetric_potential_functional(u: Field) -> float:
    """Vfunc for even densities: integral |x| rho(x) eta(x) dx."""
    rho = _rho(u)
    if not u.grid.is_symmetric:
        raise AsymmetricInput("symmetric formula needs a symmetric grid")
    if np.max(np.abs(rho - rho[::-1])) > SYMMETRY_TOLERANCE:
        raise AsymmetricInput("density is not even")
    return float(np.dot(u.grid.weights, np.abs(u.grid.x) * rho * shell_mass(u)))


def x_norm(u: Field) -> float:
    """Squared norm of the energy space: integral |u_x|^2 + |u|^2 + |x||u|^2."""
    rho = _rho(u)
    return kinetic_energy(u) + particle_number(u) + float(
        np.dot(u.grid.weights, np.abs(u.grid.x) * rho)
    )


__all__ = [
    "EnergyBreakdown",
    "particle_number",
    "kinetic_energy",
    "potential_functional",
    "total_energy",
    "virial_residual",
    "energy_ratio",
    "kernel_bilinear",
    "kernel_quadratic_form",
    "symmetric_decreasing_rearrangement",
    "jensen_lower_bound",
    "shell_mass",
    "symmetric_potential_functional",
    "x_norm",
    "integrate",
]
