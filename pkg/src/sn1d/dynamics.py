"""Strang splitting for i u_t + u_xx - (gamma/2) (|x| * |u|^2) u = 0.

The nonlinear sub-flow i u_t = gamma V[u] u leaves |u| (hence V) unchanged
and is solved exactly as a phase rotation.  The linear sub-flow is a
Crank-Nicolson step with the same discrete kinetic operator K that defines
T(u), so N is conserved to round-off and E is measured against one fixed
discrete energy.  Dirichlet walls at both box ends.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_banded

from .errors import BlowUp, InvalidStep, SolverBreakdown
from .field_core import (
    KINETIC_BANDWIDTH,
    Field,
    Grid,
    kinetic_banded,
    kinetic_matrix,
    signed_potential,
    symmetric_grid,
)
from .functionals import total_energy

DEFAULT_HALF_WIDTH = 40.0
DEFAULT_NODES = 2049
DEFAULT_DT = 1e-3


def default_grid() -> Grid:
    return symmetric_grid(DEFAULT_HALF_WIDTH, DEFAULT_NODES)


def potential_step(u: Field, gamma: float, dt: float) -> Field:
    rho = u.density().values
    v = signed_potential(u.grid, rho)
    return Field(u.grid, u.values * np.exp(-1j * gamma * dt * v))


@lru_cache(maxsize=16)
def _cn_operators(grid: Grid, dt: float):
    b = KINETIC_BANDWIDTH
    ab = kinetic_banded(grid).astype(complex) * (0.5j * dt)
    ab[b] += 1.0
    k = kinetic_matrix(grid)[1:-1, 1:-1].tocsr()
    return ab, k


def kinetic_step(u: Field, dt: float) -> Field:
    """(1 + i dt/2 K) u_new = (1 - i dt/2 K) u on the interior nodes."""
    if dt == 0:
        return u
    ab, k = _cn_operators(u.grid, float(dt))
    inner = np.asarray(u.values[1:-1], dtype=complex)
    rhs = inner - 0.5j * dt * (k @ inner)
    try:
        sol = solve_banded((KINETIC_BANDWIDTH, KINETIC_BANDWIDTH), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - matrix is never singular
        raise SolverBreakdown(str(exc)) from exc
    if not np.all(np.isfinite(sol)):
        raise SolverBreakdown("Crank-Nicolson solve produced non-finite values")
    out = np.zeros(u.grid.n, dtype=complex)
    out[1:-1] = sol
    return Field(u.grid, out)


def strang_step(u: Field, gamma: float, dt: float) -> Field:
    u = potential_step(u, gamma, 0.5 * dt)
    u = kinetic_step(u, dt)
    return potential_step(u, gamma, 0.5 * dt)


@dataclass
class Observables:
    times: list = field(default_factory=list)
    N_series: list = field(default_factory=list)
    E_series: list = field(default_factory=list)
    profile_deviation: list = field(default_factory=list)
    phase: list = field(default_factory=list)

    def record(self, t: float, u: Field, modulus0: np.ndarray, gamma: float, ref: int):
        b = total_energy(u, gamma)
        self.times.append(t)
        self.N_series.append(b.N)
        self.E_series.append(b.E)
        self.profile_deviation.append(float(np.max(np.abs(np.abs(u.values) - modulus0))))
        self.phase.append(float(np.angle(u.values[ref])))

    def unwrapped_phase(self) -> np.ndarray:
        return np.unwrap(np.asarray(self.phase))

    def rows(self):
        return zip(self.times, self.N_series, self.E_series, self.profile_deviation)


def evolve(u0: Field, gamma: float = 1.0, t_final: float = 1.0, dt: float = DEFAULT_DT,
           sample_every: int = 1, blowup: float = 1e6):
    """Propagate to t_final; returns (u(t_final), Observables).

    The phase is tracked at the node of largest |u0|.
    """
    if not dt > 0:
        raise InvalidStep(f"time step must be positive, got {dt}")
    if t_final < 0:
        raise InvalidStep(f"t_final must be nonnegative, got {t_final}")
    if sample_every < 1:
        raise InvalidStep("sample_every must be at least 1")
    u = Field(u0.grid, np.asarray(u0.values, dtype=complex))
    modulus0 = np.abs(u.values)
    ref = int(np.argmax(modulus0))
    limit = blowup * max(modulus0.max(), 1e-300)
    obs = Observables()
    obs.record(0.0, u, modulus0, gamma, ref)
    steps = int(round(t_final / dt))
    if steps and abs(steps * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise InvalidStep("t_final must be an integer multiple of dt")
    for i in range(1, steps + 1):
        u = strang_step(u, gamma, dt)
        if np.max(np.abs(u.values)) > limit:
            raise BlowUp(f"|u| exceeded {limit:g} at t={i * dt:g}")
        if i % sample_every == 0 or i == steps:
            obs.record(i * dt, u, modulus0, gamma, ref)
    return u, obs


def mass_drift(obs: Observables) -> float:
    n = np.asarray(obs.N_series)
    return float(np.max(np.abs(n - n[0])) / n[0])


def energy_drift(obs: Observables) -> float:
    e = np.asarray(obs.E_series)
    return float(np.max(np.abs(e - e[0])) / abs(e[0]))


def position_variance(u: Field) -> float:
    rho = u.density().values
    w = u.grid.weights
    n = np.dot(w, rho)
    mean = np.dot(w, u.grid.x * rho) / n
    return float(np.dot(w, (u.grid.x - mean) ** 2 * rho) / n)


__all__ = [
    "potential_step",
    "kinetic_step",
    "strang_step",
    "evolve",
    "Observables",
    "mass_drift",
    "energy_drift",
    "position_variance",
    "default_grid",
]
