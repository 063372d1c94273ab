from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Literal, Optional

from .field_core import Field
from .functionals import EnergyBreakdown, energy_ratio, virial_residual

Parity = Literal["even", "odd"]


@dataclass(frozen=True)
class StationaryState:
    """A bound state phi with frequency omega, u(t, x) = phi(x) exp(-i omega t).

    ``node_count`` is the number of sign changes on the open half-line x > 0,
    the label used for the search; see :attr:`full_line_nodes`.
    """

    profile: Field
    omega: float
    gamma: float
    breakdown: EnergyBreakdown
    node_count: int
    parity: Parity
    method: Literal["shooting", "minimizer"]
    shoot_param: Optional[float] = None
    converged: bool = True
    iterations: int = 0
    residual: Optional[float] = None
    trajectory: Any = None

    @property
    def full_line_nodes(self) -> int:
        return 2 * self.node_count + (1 if self.parity == "odd" else 0)

    @property
    def virial_residual(self) -> float:
        return virial_residual(self.breakdown)

    @property
    def energy_ratio(self) -> float:
        return energy_ratio(self.breakdown)

    def replace(self, **changes) -> "StationaryState":
        return replace(self, **changes)

    def summary(self) -> dict:
        b = self.breakdown
        return {
            "method": self.method,
            "parity": self.parity,
            "omega": self.omega,
            "gamma": self.gamma,
            "N": b.N,
            "T": b.T,
            "Vfunc": b.Vfunc,
            "E": b.E,
            "omega_rayleigh": b.omega,
            "virial_residual": self.virial_residual,
            "energy_ratio": self.energy_ratio,
            "shoot_param": self.shoot_param,
            "node_count": self.node_count,
            "converged": self.converged,
        }
