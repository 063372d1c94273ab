"""Uniform 1D grids, sampled fields, quadrature and the |x| convolution.

Everything downstream integrates with the same composite trapezoid weights,
so discrete identities such as ``integral(V * rho) == Vfunc`` hold to
round-off rather than to quadrature order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import InvalidBounds, NegativeDensity

DENSITY_TOLERANCE = 1e-14


@dataclass(frozen=True)
class Grid:
    """Uniform mesh ``x_i = x_min + i*h`` with ``n`` nodes."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise InvalidBounds("grid bounds must be finite")
        if self.x_min >= self.x_max:
            raise InvalidBounds(f"x_min={self.x_min} must be < x_max={self.x_max}")
        if int(self.n) != self.n or self.n < 3:
            raise InvalidBounds(f"need an integer n >= 3, got {self.n}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def is_symmetric(self) -> bool:
        return self.x_min == -self.x_max and self.n % 2 == 1

    @property
    def center(self) -> int:
        """Index of the node at x = 0 (symmetric grids only)."""
        if not self.is_symmetric:
            raise InvalidBounds("grid is not symmetric about 0")
        return (self.n - 1) // 2

    @cached_property
    def x(self) -> np.ndarray:
        i = np.arange(self.n)
        if self.is_symmetric:
            # exact zero at the center and exact mirror pairs
            x = (i - (self.n - 1) // 2) * self.h
        else:
            x = self.x_min + i * self.h
        x.setflags(write=False)
        return x

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        w.setflags(write=False)
        return w


def make_grid(x_min: float, x_max: float, n: int) -> Grid:
    return Grid(float(x_min), float(x_max), int(n))


def symmetric_grid(half_width: float, n: int) -> Grid:
    return make_grid(-half_width, half_width, n)


@dataclass(frozen=True)
class Field:
    """Real or complex samples on a grid.

    ``diverged`` marks products of blown-up trajectories, the only fields
    allowed to carry non-finite samples.
    """

    grid: Grid
    values: np.ndarray
    diverged: bool = field(default=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.dtype.kind not in "fc":
            values = values.astype(float)
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"field has shape {values.shape}, grid has {self.grid.n} nodes"
            )
        if not self.diverged and not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite samples")
        object.__setattr__(self, "values", values)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def with_values(self, values) -> "Field":
        return Field(self.grid, values)

    def density(self) -> "Field":
        v = self.values
        return Field(self.grid, (v.real**2 + v.imag**2) if self.is_complex else v * v)


def field_from_function(grid: Grid, fn) -> Field:
    return Field(grid, fn(grid.x))


def integrate(f: Field) -> float:
    """Composite trapezoid rule over the whole grid."""
    return complex(np.dot(f.grid.weights, f.values)) if f.is_complex else float(
        np.dot(f.grid.weights, f.values)
    )


def inner(a: Field, b: Field) -> float:
    """Real part of the trapezoid L2 inner product."""
    return float(np.real(np.dot(a.grid.weights, np.conj(a.values) * b.values)))


def resample(f: Field, grid: Grid) -> Field:
    """Linear interpolation onto ``grid``; zero outside the source range."""
    src = f.grid.x
    if f.is_complex:
        re = np.interp(grid.x, src, f.values.real, left=0.0, right=0.0)
        im = np.interp(grid.x, src, f.values.imag, left=0.0, right=0.0)
        return Field(grid, re + 1j * im)
    return Field(grid, np.interp(grid.x, src, f.values, left=0.0, right=0.0))


def _check_density(rho: Field) -> None:
    if rho.is_complex:
        raise NegativeDensity("density must be real")
    low = rho.values.min()
    if low < -DENSITY_TOLERANCE:
        raise NegativeDensity(f"density sample {low:g} below -{DENSITY_TOLERANCE:g}")


def signed_potential(grid: Grid, values: np.ndarray) -> np.ndarray:
    """``0.5 * sum_j w_j |x_i - x_j| f_j`` in O(n) for any real samples."""
    x = grid.x
    wf = grid.weights * values
    m = np.cumsum(wf)
    p = np.cumsum(wf * x)
    return 0.5 * (x * (2.0 * m - m[-1]) - (2.0 * p - p[-1]))


def coulomb_potential(rho: Field) -> Field:
    """V(x) = 1/2 * integral |x - y| rho(y) dy via prefix sums."""
    _check_density(rho)
    return Field(rho.grid, signed_potential(rho.grid, rho.values))


def coulomb_potential_reference(rho: Field) -> Field:
    """O(n^2) double-loop evaluation of the same quadrature (test oracle)."""
    _check_density(rho)
    x = rho.grid.x
    wf = rho.grid.weights * rho.values
    out = np.empty(rho.grid.n)
    for i in range(rho.grid.n):
        out[i] = 0.5 * np.sum(np.abs(x[i] - x) * wf)
    return Field(rho.grid, out)


# Kinetic form.  T(u) = h * sum_m |(S u)_m|^2 over the n-1 cell midpoints,
# S the fourth-order staggered first difference (two-point in the end cells).
# K = S^T S is the matching discrete -d^2/dx^2: the gradient of T in the
# trapezoid inner product is exactly 2 K u at interior nodes.


@lru_cache(maxsize=32)
def stagger_matrix(grid: Grid) -> sp.csr_matrix:
    n, h = grid.n, grid.h
    rows, cols, vals = [], [], []
    for m in range(n - 1):
        if 1 <= m <= n - 3:
            for off, c in zip((-1, 0, 1, 2), (1.0, -27.0, 27.0, -1.0)):
                rows.append(m)
                cols.append(m + off)
                vals.append(c / (24.0 * h))
        else:
            rows += [m, m]
            cols += [m, m + 1]
            vals += [-1.0 / h, 1.0 / h]
    return sp.csr_matrix((vals, (rows, cols)), shape=(n - 1, n))


@lru_cache(maxsize=32)
def kinetic_matrix(grid: Grid) -> sp.csr_matrix:
    s = stagger_matrix(grid)
    return (s.T @ s).tocsr()


KINETIC_BANDWIDTH = 3


@lru_cache(maxsize=32)
def kinetic_banded(grid: Grid) -> np.ndarray:
    """Interior block of K in LAPACK banded layout (3 sub/super diagonals)."""
    k = kinetic_matrix(grid)[1:-1, 1:-1].todia()
    b = KINETIC_BANDWIDTH
    m = grid.n - 2
    ab = np.zeros((2 * b + 1, m))
    for off, diag in zip(k.offsets, k.data):
        if abs(off) > b:
            if np.any(diag):
                raise AssertionError("kinetic operator wider than expected")
            continue
        # dia storage: data[d, j] = A[j - off, j]
        ab[b - off, :] = diag[:m]
    return ab


def apply_kinetic(u: np.ndarray, grid: Grid) -> np.ndarray:
    return kinetic_matrix(grid) @ u
