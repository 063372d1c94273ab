import math

import numpy as np
import pytest

from sn1d.errors import DegenerateState
from sn1d.field_core import Field, make_grid, symmetric_grid
from sn1d.functionals import (
    particle_number,
    symmetric_decreasing_rearrangement,
    total_energy,
    virial_residual,
)
from sn1d.minimizer import (
    MinimizeConfig,
    MinimizeHistory,
    default_grid,
    default_initial,
    double_bump_initial,
    energy_gradient,
    minimize,
    projected_residual,
)
from sn1d.validation import sup_distance


@pytest.fixture(scope="module")
def grid():
    return default_grid()


@pytest.fixture(scope="module")
def e0(grid, ground):
    return minimize(MinimizeConfig(lam=ground.breakdown.N), grid=grid)


def _energy(values, grid):
    return total_energy(Field(grid, values)).E


def test_zero_gradient(grid):
    assert np.all(energy_gradient(Field(grid, np.zeros(grid.n))).values == 0)


def test_gradient_matches_finite_difference(rng):
    g = symmetric_grid(10, 1025)
    u = np.exp(-g.x**2 / 3) * (1 + 0.2 * np.sin(g.x))
    u[[0, -1]] = 0
    grad = energy_gradient(Field(g, u)).values
    eps = 1e-5
    for _ in range(5):
        d = rng.normal(size=g.n) * np.exp(-g.x**2 / 8)
        d[[0, -1]] = 0
        fd = (_energy(u + eps * d, g) - _energy(u - eps * d, g)) / (2 * eps)
        assert abs(np.dot(g.weights, grad * d) - fd) <= 1e-6


def test_lagrange_stationarity(e0):
    u = e0.profile
    g = energy_gradient(u).values
    w = u.grid.weights
    r = g - 2 * e0.omega * u.values
    assert math.sqrt(np.dot(w, r * r)) <= 1e-6 * math.sqrt(np.dot(w, u.values**2))


def test_cross_method(e0, ground):
    assert e0.converged
    assert abs(e0.breakdown.E - ground.breakdown.E) <= 1e-4 * ground.breakdown.E
    assert sup_distance(e0.profile, ground.profile) <= 1e-3


def test_minimizer_virial(e0):
    assert virial_residual(e0.breakdown) <= 1e-4
    assert abs(e0.energy_ratio - 0.6) <= 1e-4


def test_minimizer_shape(e0):
    u = e0.profile.values
    c = e0.profile.grid.center
    assert np.max(np.abs(u - u[::-1])) <= 1e-6 * u.max()
    assert np.all(np.diff(u[c:]) <= 1e-6 * u.max())
    assert e0.node_count == 0 and e0.method == "minimizer"


def test_mass_scaling(grid):
    a = minimize(MinimizeConfig(lam=1.0), grid=grid).breakdown.E
    b = minimize(MinimizeConfig(lam=2.0), grid=grid).breakdown.E
    assert abs(b / a - 2 ** (5 / 3)) <= 1e-3 * 2 ** (5 / 3)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_odd_above_even(grid, lam):
    even = minimize(MinimizeConfig(lam=lam), grid=grid)
    odd = minimize(MinimizeConfig(lam=lam, parity="odd"), grid=grid)
    assert odd.converged and even.converged
    assert odd.breakdown.E > even.breakdown.E
    u = odd.profile.values
    c = odd.profile.grid.center
    assert np.max(np.abs(u + u[::-1])) == 0
    big = np.abs(u[c + 1:]) > 1e-8 * np.abs(u).max()
    assert np.all(u[c + 1:][big] > 0)


def test_odd_matches_shooting(grid, odd):
    s = minimize(MinimizeConfig(lam=odd.breakdown.N, parity="odd"), grid=grid)
    assert s.breakdown.E == pytest.approx(odd.breakdown.E, rel=1e-4)
    assert sup_distance(s.profile, odd.profile, align=False) <= 1e-3


def test_default_initial(grid):
    u = default_initial(grid, 1.0)
    assert abs(particle_number(u) - 1.0) <= 1e-12
    v = default_initial(grid, 3.0, "odd")
    np.testing.assert_array_equal(v.values, -v.values[::-1])
    with pytest.raises(ValueError):
        default_initial(grid, 0.0)
    with pytest.raises(ValueError):
        default_initial(grid, -1.0)


def test_degenerate_initial_rejected(grid):
    with pytest.raises(DegenerateState):
        minimize(MinimizeConfig(lam=1.0), initial=Field(grid, np.zeros(grid.n)))


@pytest.mark.parametrize("kw", [dict(lam=0), dict(lam=1, gamma=0), dict(lam=1, grad_tol=1),
                                dict(lam=1, max_iter=0), dict(lam=1, parity="even"),
                                dict(lam=1, step=-1)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        MinimizeConfig(**kw)


def test_odd_needs_symmetric_grid():
    g = make_grid(-5, 6, 101)
    u = Field(g, g.x * np.exp(-g.x**2))
    with pytest.raises(ValueError):
        minimize(MinimizeConfig(lam=1, parity="odd"), initial=u)


def test_history_monotone_and_constrained():
    g = symmetric_grid(20, 2049)
    hist = MinimizeHistory()
    rearranged_ok = []

    def watch(it, u, energy):
        r = symmetric_decreasing_rearrangement(Field(g, u.values**2))
        star = Field(g, np.sqrt(r.values))
        rearranged_ok.append(total_energy(star).E <= energy + 1e-10)

    seed = double_bump_initial(g, 2.0)
    s = minimize(MinimizeConfig(lam=2.0), initial=seed, callback=watch, history=hist)
    assert s.converged
    e = np.array(hist.energy)
    assert np.all(np.diff(e) <= 1e-14)
    np.testing.assert_allclose(hist.mass, 2.0, rtol=0, atol=1e-12)
    assert all(rearranged_ok)


def test_convergence_residual_definition(e0):
    assert projected_residual(e0.profile) == pytest.approx(e0.residual, rel=1e-6, abs=1e-12)
    assert e0.residual <= 1e-8


def test_two_seeds_agree(grid, e0):
    other = minimize(MinimizeConfig(lam=e0.breakdown.N),
                     initial=double_bump_initial(grid, e0.breakdown.N))
    assert sup_distance(other.profile, e0.profile) <= 1e-3


def test_max_iter_returns_best_iterate(grid):
    s = minimize(MinimizeConfig(lam=1.0, max_iter=1), grid=grid)
    assert not s.converged
    assert s.iterations == 1
    assert s.breakdown.E < total_energy(default_initial(grid, 1.0)).E


def test_unpreconditioned_descent_decreases_energy():
    g = symmetric_grid(16, 257)
    s = minimize(MinimizeConfig(lam=1.0, preconditioned=False, max_iter=300), grid=g)
    assert s.breakdown.E < total_energy(default_initial(g, 1.0)).E
    assert s.breakdown.N == pytest.approx(1.0, rel=1e-12)
