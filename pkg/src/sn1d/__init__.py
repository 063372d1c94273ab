"""Stationary states and dynamics of the one-dimensional Schrodinger-Newton system.

    -phi'' + gamma V phi = omega phi,   V = 1/2 |x| * phi^2

Shooting and constrained minimization for stationary states, energy
functionals and bounds, a Strang-split propagator, and a validation suite.
"""
from .errors import *  # noqa: F401,F403
from .field_core import (
    Field,
    Grid,
    coulomb_potential,
    coulomb_potential_reference,
    integrate,
    inner,
    make_grid,
    resample,
    signed_potential,
    symmetric_grid,
)
from .functionals import (
    EnergyBreakdown,
    energy_ratio,
    kinetic_energy,
    particle_number,
    potential_functional,
    symmetric_decreasing_rearrangement,
    total_energy,
    virial_residual,
)
from .shooting import (
    absorb_coupling,
    find_state,
    integrate_ode,
    rescale_state,
    shoot_antisymmetric,
    shoot_symmetric,
    wronskian_diagnostic,
)
from .states import StationaryState
from .minimizer import MinimizeConfig, minimize
from .dynamics import evolve, strang_step
from .validation import run_all

__version__ = "0.1.0"
