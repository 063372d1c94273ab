import numpy as np
import pytest

from sn1d.dynamics import (
    default_grid,
    energy_drift,
    evolve,
    kinetic_step,
    mass_drift,
    position_variance,
    potential_step,
    strang_step,
)
from sn1d.errors import BlowUp, InvalidStep
from sn1d.field_core import Field, resample, symmetric_grid
from sn1d.functionals import particle_number
from sn1d.validation import strang_rate


@pytest.fixture(scope="module")
def grid():
    return default_grid()


@pytest.fixture(scope="module")
def gaussian0(grid):
    return Field(grid, np.exp(-((grid.x - 0.5) ** 2)) * (1 + 0j))


@pytest.fixture(scope="module")
def ground_run(ground, grid):
    u0 = resample(ground.profile, grid)
    return u0, evolve(u0, 1.0, 1.0, 1e-3)


def test_potential_step_identity_and_modulus(gaussian0):
    assert np.array_equal(potential_step(gaussian0, 1.0, 0.0).values, gaussian0.values)
    out = potential_step(gaussian0, 1.0, 0.3)
    np.testing.assert_allclose(np.abs(out.values), np.abs(gaussian0.values), rtol=1e-15, atol=1e-300)


def test_potential_half_steps_compose(gaussian0):
    two = potential_step(potential_step(gaussian0, 1.0, 0.05), 1.0, 0.05)
    one = potential_step(gaussian0, 1.0, 0.1)
    np.testing.assert_allclose(two.values, one.values, rtol=0, atol=1e-14)


def test_kinetic_step_identity_and_unitarity(gaussian0):
    assert kinetic_step(gaussian0, 0.0) is gaussian0
    out = kinetic_step(gaussian0, 1e-2)
    assert abs(particle_number(out) - particle_number(gaussian0)) <= 1e-12 * particle_number(gaussian0)


def test_free_gaussian_spreading():
    # u0 = exp(-x^2) under i u_t + u_xx = 0 has <x^2>(t) = 1/4 + 4 t^2
    g = symmetric_grid(40, 2049)
    u = Field(g, np.exp(-g.x**2) * (1 + 0j))
    dt = 1e-3
    for step in range(1, 501):
        u = kinetic_step(u, dt)
        if step % 100 == 0:
            t = step * dt
            assert abs(position_variance(u) - (0.25 + 4 * t * t)) <= 1e-3


def test_zero_final_time(gaussian0):
    u, obs = evolve(gaussian0, 1.0, 0.0, 1e-3)
    np.testing.assert_array_equal(u.values, gaussian0.values)
    assert len(obs.times) == 1 and list(obs.rows())[0][3] == 0.0


@pytest.mark.parametrize("kw", [dict(dt=0.0), dict(dt=-1e-3), dict(t_final=-1.0),
                                dict(t_final=0.0105), dict(sample_every=0)])
def test_invalid_steps(gaussian0, kw):
    args = dict(gamma=1.0, t_final=0.01, dt=1e-3)
    args.update(kw)
    with pytest.raises(InvalidStep):
        evolve(gaussian0, **args)


def test_blowup_guard(gaussian0):
    with pytest.raises(BlowUp):
        evolve(gaussian0, 1.0, 0.01, 1e-3, blowup=0.5)


def test_ground_state_rotates_rigidly(ground, ground_run):
    u0, (u, obs) = ground_run
    assert max(obs.profile_deviation) <= 1e-4
    phase = obs.unwrapped_phase()
    t = np.asarray(obs.times)
    assert np.max(np.abs(phase + ground.omega * t)) <= 1e-3


def test_observables_structure(ground_run):
    _, (_, obs) = ground_run
    n = len(obs.times)
    assert n == 1001
    assert len(obs.N_series) == len(obs.E_series) == len(obs.profile_deviation) == n
    assert np.all(np.diff(obs.times) > 0)


def test_gaussian_conservation(gaussian0):
    _, obs = evolve(gaussian0, 1.0, 1.0, 1e-3, sample_every=10)
    assert mass_drift(obs) <= 1e-10
    assert energy_drift(obs) <= 1e-6
    assert obs.times[-1] == pytest.approx(1.0)


def test_strang_second_order(gaussian0):
    assert strang_rate(gaussian0) >= 1.8


def test_parity_preserved(grid):
    u0 = Field(grid, grid.x * np.exp(-grid.x**2 / 2) * (1 + 0j))
    u, _ = evolve(u0, 1.0, 0.2, 1e-3, sample_every=50)
    assert np.max(np.abs(u.values + u.values[::-1])) <= 1e-10 * np.max(np.abs(u.values))


def test_strang_step_is_symmetric_composition(gaussian0):
    a = strang_step(gaussian0, 1.0, 1e-2)
    b = potential_step(kinetic_step(potential_step(gaussian0, 1.0, 5e-3), 1e-2), 1.0, 5e-3)
    np.testing.assert_array_equal(a.values, b.values)
