import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sn1d.errors import InvalidBounds, NegativeDensity
from sn1d.field_core import (
    Field,
    coulomb_potential,
    coulomb_potential_reference,
    integrate,
    inner,
    kinetic_banded,
    kinetic_matrix,
    make_grid,
    resample,
    signed_potential,
    symmetric_grid,
)


def test_three_node_grid():
    g = make_grid(-1, 1, 3)
    np.testing.assert_array_equal(g.x, [-1.0, 0.0, 1.0])
    assert g.h == 1.0
    assert g.center == 1


def test_box_spacing():
    g = make_grid(-40, 40, 4097)
    assert g.h == 80 / 4096
    assert g.x[0] == -40 and g.x[-1] == 40 and g.x[g.center] == 0.0


@pytest.mark.parametrize("args", [(0, 0, 10), (1, 0, 10), (0, 1, 2), (0, math.inf, 5)])
def test_invalid_bounds(args):
    with pytest.raises(InvalidBounds):
        make_grid(*args)


def test_affine_mapping_nonsymmetric():
    g = make_grid(0.25, 3.5, 14)
    i = np.arange(14)
    np.testing.assert_array_equal(g.x, 0.25 + i * g.h)
    assert not g.is_symmetric
    with pytest.raises(InvalidBounds):
        g.center


def test_symmetric_grid_mirror_pairs():
    g = symmetric_grid(7.3, 101)
    np.testing.assert_array_equal(g.x, -g.x[::-1])


def test_field_rejects_bad_samples():
    g = make_grid(0, 1, 5)
    with pytest.raises(ValueError):
        Field(g, np.zeros(4))
    with pytest.raises(ValueError):
        Field(g, np.array([0, 1, np.nan, 0, 0]))
    f = Field(g, np.array([0, 1, np.inf, 0, 0]), diverged=True)
    assert f.diverged


def test_integrate_constant_exact():
    g = make_grid(0, 1, 11)
    assert integrate(Field(g, np.ones(11))) == pytest.approx(1.0, abs=1e-15)


def test_integrate_gaussian(big_grid):
    f = Field(big_grid, np.exp(-2 * big_grid.x**2))
    assert abs(integrate(f) - math.sqrt(math.pi / 2)) < 1e-10


def test_integrate_odd_vanishes(big_grid):
    x = big_grid.x
    f = Field(big_grid, x * np.exp(-(x - 0.0) ** 2) * (1 + x**2))
    assert abs(integrate(f)) < 1e-13


def test_inner_matches_integrate(big_grid):
    u = Field(big_grid, np.exp(-big_grid.x**2) * (1 + 0.5j))
    assert inner(u, u) == pytest.approx(1.25 * math.sqrt(math.pi / 2), rel=1e-10)


def test_resample_zero_outside():
    src = make_grid(-1, 1, 21)
    dst = make_grid(-2, 2, 41)
    out = resample(Field(src, 1 - src.x**2), dst)
    assert np.all(out.values[np.abs(dst.x) > 1] == 0)
    np.testing.assert_allclose(out.values[10:31], 1 - dst.x[10:31] ** 2, atol=1e-2)


def test_spike_potential_is_half_abs_x():
    g = symmetric_grid(10, 2001)
    rho = np.zeros(g.n)
    rho[g.center] = 1 / g.h
    v = coulomb_potential(Field(g, rho)).values
    np.testing.assert_allclose(v, 0.5 * np.abs(g.x), atol=1e-12)


@pytest.mark.parametrize("fn", [coulomb_potential, coulomb_potential_reference])
def test_box_density_center_value(fn):
    # half values on the jump nodes make the trapezoid rule exact for |y|
    g = symmetric_grid(2, 4001)
    rho = (np.abs(g.x) < 0.5).astype(float)
    rho[np.isclose(np.abs(g.x), 0.5)] = 0.5
    v = fn(Field(g, rho)).values
    assert v[g.center] == pytest.approx(1 / 8, abs=1e-7)


def test_zero_density_reference():
    g = make_grid(-1, 1, 9)
    assert np.all(coulomb_potential_reference(Field(g, np.zeros(9))).values == 0)


def test_reference_even_for_even_density(rng):
    g = symmetric_grid(5, 301)
    r = rng.random(151)
    rho = np.concatenate((r[:0:-1], r))
    v = coulomb_potential_reference(Field(g, rho)).values
    assert np.max(np.abs(v - v[::-1])) <= 1e-13


def test_prefix_matches_reference_random(rng):
    g = make_grid(-3, 5, 257)
    for _ in range(50):
        rho = Field(g, rng.random(g.n) * rng.random())
        a = coulomb_potential(rho).values
        b = coulomb_potential_reference(rho).values
        assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


def test_negative_density_rejected():
    g = make_grid(0, 1, 5)
    with pytest.raises(NegativeDensity):
        coulomb_potential(Field(g, np.array([0, 1, -1e-10, 0, 0])))
    # round-off below the tolerance is accepted
    coulomb_potential(Field(g, np.array([0, 1, -1e-15, 0, 0])))


def test_boundary_slope_approaches_half_mass():
    g = symmetric_grid(30, 3001)
    rho = np.where(np.abs(g.x) < 1, 1 - g.x**2, 0.0)
    mass = np.dot(g.weights, rho)
    v = signed_potential(g, rho)
    right = (v[-1] - v[-2]) / g.h
    left = (v[1] - v[0]) / g.h
    assert right == pytest.approx(mass / 2, rel=1e-2)
    assert left == pytest.approx(-mass / 2, rel=1e-2)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, 65, elements=st.floats(0, 10)))
def test_potential_nonnegative_and_convex(samples):
    g = make_grid(-2, 3, 65)
    v = coulomb_potential(Field(g, samples)).values
    assert np.all(v >= 0)
    assert np.all(np.diff(v, 2) >= -1e-10 * max(1.0, v.max()))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, 33, elements=st.floats(0, 5)))
def test_prefix_equals_oracle_property(samples):
    g = make_grid(-1, 1, 33)
    a = coulomb_potential(Field(g, samples)).values
    b = coulomb_potential_reference(Field(g, samples)).values
    assert np.max(np.abs(a - b)) <= 1e-12 * max(1e-300, np.max(np.abs(b))) + 1e-300


def test_potential_second_difference_is_density(rng):
    # V'' = rho on interior nodes, exactly under the trapezoid weights
    g = make_grid(-4, 4, 201)
    rho = rng.random(g.n)
    rho[[0, -1]] = 0
    v = signed_potential(g, rho)
    np.testing.assert_allclose(np.diff(v, 2) / g.h**2, rho[1:-1], rtol=1e-8, atol=1e-8)


def test_kinetic_matrix_symmetric_psd():
    g = make_grid(-1, 1, 31)
    k = kinetic_matrix(g).toarray()
    np.testing.assert_allclose(k, k.T, atol=1e-9)
    assert np.linalg.eigvalsh(k).min() > -1e-9
    np.testing.assert_allclose(k @ np.ones(g.n), 0, atol=1e-8)


def test_kinetic_banded_layout():
    g = make_grid(-1, 1, 21)
    ab = kinetic_banded(g)
    dense = kinetic_matrix(g)[1:-1, 1:-1].toarray()
    m = g.n - 2
    rebuilt = np.zeros((m, m))
    for i in range(m):
        for j in range(max(0, i - 3), min(m, i + 4)):
            rebuilt[i, j] = ab[3 + i - j, j]
    np.testing.assert_allclose(rebuilt, dense)
