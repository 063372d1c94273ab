"""Identity and oracle checks for the computed bound states.

Each check returns :class:`Check` rows; :func:`run_all` executes the whole
suite.  ``quick=True`` runs a subset on coarse grids (n = 513 for the
minimizer and the propagator) against bounds loosened by ``QUICK_FACTOR``
wherever the bound is set by spatial discretization.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, List, Optional

import numpy as np

from .dynamics import energy_drift, evolve, mass_drift
from .field_core import (
    Field,
    coulomb_potential,
    coulomb_potential_reference,
    make_grid,
    resample,
    symmetric_grid,
)
from .functionals import (
    kernel_bilinear,
    kernel_quadratic_form,
    kinetic_energy,
    particle_number,
    symmetric_decreasing_rearrangement,
    total_energy,
)
from .minimizer import (
    MinimizeConfig,
    double_bump_initial,
    energy_gradient,
    minimize,
)
from .shooting import (
    OdeState,
    find_state,
    integrate_ode,
    ode_energy,
    rescale_state,
    shoot_symmetric,
)

QUICK_FACTOR = 100.0


@dataclass
class Check:
    name: str
    criterion: int
    value: float
    bound: float
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "criterion": self.criterion,
            "value": self.value,
            "bound": self.bound,
            "passed": self.passed,
            "detail": self.detail,
        }


def _le(name, criterion, value, bound, detail=""):
    value = float(value)
    return Check(name, criterion, value, bound, bool(value <= bound), detail)


def _gt(name, criterion, value, bound, detail=""):
    value = float(value)
    return Check(name, criterion, value, bound, bool(value > bound), detail)


def _ge(name, criterion, value, bound, detail=""):
    value = float(value)
    return Check(name, criterion, value, bound, bool(value >= bound), detail)


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def center_of_mass(u: Field) -> float:
    rho = u.density().values
    w = u.grid.weights
    return float(np.dot(w, u.grid.x * rho) / np.dot(w, rho))


def sup_distance(a: Field, b: Field, align: bool = True) -> float:
    """Sup distance after resampling ``b`` onto the grid of ``a``.

    With ``align`` the centers of mass are matched first; E is translation
    invariant, so minimizers from off-center seeds land on shifted copies.
    """
    shift = center_of_mass(b) - center_of_mass(a) if align else 0.0
    vb = np.interp(a.grid.x + shift, b.grid.x, b.values, left=0.0, right=0.0)
    return float(np.max(np.abs(a.values - vb)))


def random_bump_field(grid, rng, rough: bool = False) -> np.ndarray:
    """Nonnegative sum of random Gaussian bumps, vanishing at the box ends."""
    rho = np.zeros(grid.n)
    half = 0.5 * (grid.x_max - grid.x_min)
    for _ in range(int(rng.integers(1, 5))):
        c = rng.uniform(-0.5 * half, 0.5 * half)
        s = rng.uniform(0.02, 0.2) * half
        rho += rng.uniform(0.1, 2.0) * np.exp(-0.5 * ((grid.x - c) / s) ** 2)
    if rough:
        rho *= rng.uniform(0.5, 1.5, grid.n)
    rho[0] = rho[-1] = 0.0
    return rho


def indicator_difference(grid) -> Field:
    """chi_[0,1] - chi_[1,2], with the mean of the one-sided limits at jumps."""
    x = grid.x
    f = np.where((x > 0) & (x < 1), 1.0, 0.0) - np.where((x > 1) & (x < 2), 1.0, 0.0)
    h = grid.h
    f[np.abs(x) < 0.5 * h] = 0.5
    f[np.abs(x - 1) < 0.5 * h] = 0.0
    f[np.abs(x - 2) < 0.5 * h] = -0.5
    return Field(grid, f)


@dataclass
class Context:
    """Lazily computed states shared between checks."""

    quick: bool = False
    gamma: float = 1.0
    seed: int = 12345

    @property
    def min_nodes(self) -> int:
        return 513 if self.quick else 8193

    @property
    def dyn_nodes(self) -> int:
        return 513 if self.quick else 2049

    @property
    def loose(self) -> float:
        return QUICK_FACTOR if self.quick else 1.0

    @cached_property
    def min_grid(self):
        return symmetric_grid(32.0, self.min_nodes)

    @cached_property
    def ground(self):
        return find_state("even", 0, self.gamma)

    @cached_property
    def odd(self):
        return find_state("odd", 0, self.gamma)

    def minimize(self, lam, parity="free", initial=None):
        key = (round(lam, 14), parity, initial is not None)
        cache = self.__dict__.setdefault("_min_cache", {})
        if initial is not None or key not in cache:
            s = minimize(MinimizeConfig(lam=lam, gamma=self.gamma, parity=parity),
                         initial=initial, grid=self.min_grid)
            if initial is not None:
                return s
            cache[key] = s
        return cache[key]

    @cached_property
    def min_ground(self):
        return self.minimize(self.ground.breakdown.N)


def check_virial(ctx: Context) -> List[Check]:
    g, m = ctx.ground, ctx.min_ground
    return [
        _le("virial_shooting_ground", 1, g.virial_residual, 1e-5,
            "pairwise gap of 4wN, 20T, 5gV"),
        _le("virial_minimizer_ground", 1, m.virial_residual, 1e-4 * ctx.loose),
    ]


def check_energy_ratio(ctx: Context) -> List[Check]:
    states = {"shooting_even": ctx.ground, "shooting_odd": ctx.odd,
              "minimizer_free": ctx.min_ground,
              "minimizer_odd": ctx.minimize(ctx.ground.breakdown.N, "odd")}
    worst, who = 0.0, ""
    for name, s in states.items():
        dev = abs(s.energy_ratio - 0.6) / 0.6
        if dev > worst:
            worst, who = dev, name
    return [_le("energy_ratio_3_5", 2, worst, 1e-5 * ctx.loose, f"worst: {who}")]


def scaling_slopes(state, ratios=(2.0, 4.0)):
    base = state.breakdown
    out = []
    for r in ratios:
        s = rescale_state(state, omega=r * state.omega)
        out.append((r, math.log(s.breakdown.N / base.N) / math.log(r),
                    math.log(s.breakdown.E / base.E) / math.log(r),
                    s.omega / state.omega))
    return out


def check_scaling(ctx: Context) -> List[Check]:
    rows = scaling_slopes(ctx.ground)
    n_dev = max(abs(sn - 1.5) for _, sn, _, _ in rows)
    e_dev = max(abs(se - 2.5) for _, _, se, _ in rows)
    return [
        _le("scaling_exponent_N", 3, n_dev, 1e-3, "|slope - 3/2| over r in {2,4}"),
        _le("scaling_exponent_E", 3, e_dev, 1e-3, "|slope - 5/2| over r in {2,4}"),
    ]


def check_minimization_scaling(ctx: Context) -> List[Check]:
    e1 = ctx.minimize(1.0).breakdown.E
    e2 = ctx.minimize(2.0).breakdown.E
    ratio = e2 / e1
    return [_le("e0_mass_scaling", 4, abs(ratio - 2 ** (5 / 3)) / 2 ** (5 / 3), 1e-3,
                f"e0(2)/e0(1) = {ratio:.8f}")]


def check_cross_method(ctx: Context) -> List[Check]:
    g, m = ctx.ground, ctx.min_ground
    return [
        _le("cross_method_energy", 5, _rel(g.breakdown.E, m.breakdown.E), 1e-4 * ctx.loose),
        _le("cross_method_profile", 5, sup_distance(m.profile, g.profile), 1e-3 * ctx.loose),
    ]


def check_hamiltonian(ctx: Context) -> List[Check]:
    g, o = ctx.ground, ctx.odd
    drifts = [g.trajectory.drift(g.trajectory.tail_cut()),
              o.trajectory.drift(o.trajectory.tail_cut())]
    for a in (0.3, 1.0, 1.5, 3.0):
        t = shoot_symmetric(a, ctx.gamma, x_max=4.0)
        if not t.diverged:
            drifts.append(t.hamiltonian_drift)
    a = g.shoot_param
    e0 = ode_energy(OdeState(0.0, a, 0.0, 0.0, 0.0), ctx.gamma)
    n = g.breakdown.N
    return [
        _le("ode_hamiltonian_drift", 6, max(drifts), 1e-8, "h = 1e-3"),
        _le("ode_energy_at_origin", 6, abs(e0 - a * a) / (a * a), 1e-15),
        _le("amplitude_mass_identity", 6, _rel(a * a, 0.5 * ctx.gamma * (n / 2) ** 2), 1e-4,
            "a^2 = (gamma/2)(N/2)^2"),
        _le("amplitude_mass_identity_odd", 6,
            _rel(o.shoot_param**2, 0.5 * ctx.gamma * (o.breakdown.N / 2) ** 2), 1e-4),
    ]


def check_indefinite_form(ctx: Context) -> List[Check]:
    q = kernel_quadratic_form(indicator_difference(make_grid(-4, 4, 4097)))
    return [_le("kernel_form_indefinite", 7, abs(q + 4.0 / 3.0), 1e-3, f"Q = {q:.10f}")]


def rearrangement_violations(count: int = 100, seed: int = 0, n: int = 801):
    rng = np.random.default_rng(seed)
    grid = symmetric_grid(10.0, n)
    worst = {"N": 0.0, "T": -math.inf, "kernel": -math.inf}
    bad = 0
    for i in range(count):
        rho = random_bump_field(grid, rng, rough=i % 3 == 0)
        other = random_bump_field(grid, rng)
        f = Field(grid, rho)
        fs = symmetric_decreasing_rearrangement(f)
        g = Field(grid, other)
        gs = symmetric_decreasing_rearrangement(g)
        u, us = Field(grid, np.sqrt(rho)), Field(grid, np.sqrt(fs.values))
        dn = abs(particle_number(u) - particle_number(us))
        dt = kinetic_energy(us) - kinetic_energy(u)
        dk = kernel_bilinear(fs, gs) - kernel_bilinear(f, g)
        worst["N"] = max(worst["N"], dn)
        worst["T"] = max(worst["T"], dt)
        worst["kernel"] = max(worst["kernel"], dk)
        bad += (dn > 1e-10) + (dt > 1e-8) + (dk > 1e-8)
    return bad, worst


def check_rearrangement(ctx: Context) -> List[Check]:
    bad, worst = rearrangement_violations(30 if ctx.quick else 100, ctx.seed)
    detail = ", ".join(f"{k}: {v:.3g}" for k, v in worst.items())
    return [_le("rearrangement_violations", 8, bad, 0, detail)]


def check_ordering(ctx: Context) -> List[Check]:
    gaps = []
    odd_ok = True
    for lam in ((1.0,) if ctx.quick else (0.5, 1.0, 2.0)):
        e0 = ctx.minimize(lam).breakdown.E
        s1 = ctx.minimize(lam, "odd")
        gaps.append(s1.breakdown.E - e0)
        v = s1.profile.values
        c = s1.profile.grid.center
        scale = np.max(np.abs(v))
        odd_ok &= s1.converged and bool(np.max(np.abs(v + v[::-1])) <= 1e-12 * scale)
        right = v[c + 1:]
        support = right[np.abs(right) > 1e-12 * scale]
        odd_ok &= bool(np.all(support > 0) and np.all(right >= -1e-14 * scale))
    return [
        _gt("excited_gap_e1_minus_e0", 9, min(gaps), 0.0,
            "min over lambda of e1 - e0"),
        _ge("odd_profile_shape", 9, float(odd_ok), 1.0, "converged, odd and positive on x > 0"),
    ]


def check_uniqueness(ctx: Context) -> List[Check]:
    g = ctx.ground
    a_star = g.shoot_param
    # fixed brackets with distinct endpoints; amplitudes scale as gamma^-1/2
    scale = 1.0 / math.sqrt(ctx.gamma)
    other = find_state("even", 0, ctx.gamma, bracket=(0.5 * scale, 2.0 * scale))
    third = find_state("even", 0, ctx.gamma, bracket=(1.2 * scale, 8.0 * scale))
    lam = g.breakdown.N
    seeds = [ctx.min_ground,
             ctx.minimize(lam, initial=double_bump_initial(ctx.min_grid, lam))]
    profiles = [other.profile, third.profile] + [s.profile for s in seeds]
    dist = max(sup_distance(g.profile, p) for p in profiles)
    return [
        _le("shooting_bracket_agreement", 10,
            max(abs(other.shoot_param - a_star), abs(third.shoot_param - a_star)) / a_star, 1e-10),
        _le("unique_profile_sup_distance", 10, dist, 1e-3 * ctx.loose),
    ]


def strang_rate(u0: Field, gamma: float = 1.0, t: float = 0.5, dts=(0.02, 0.01, 0.005)):
    finals = [evolve(u0, gamma, t, dt, sample_every=10**9)[0].values for dt in dts]
    rates = []
    for i in range(len(finals) - 2):
        e1 = np.max(np.abs(finals[i] - finals[i + 1]))
        e2 = np.max(np.abs(finals[i + 1] - finals[i + 2]))
        rates.append(math.log2(e1 / e2))
    return min(rates)


def check_dynamics(ctx: Context) -> List[Check]:
    grid = symmetric_grid(40.0, ctx.dyn_nodes)
    g = ctx.ground
    _, obs = evolve(resample(g.profile, grid), ctx.gamma, 1.0, 1e-3, sample_every=10)
    phase_err = float(np.max(np.abs(obs.unwrapped_phase() + g.omega * np.asarray(obs.times))))
    gauss = Field(grid, np.exp(-grid.x**2))
    _, gobs = evolve(gauss, ctx.gamma, 1.0, 1e-3, sample_every=50)
    return [
        _le("bound_state_profile_deviation", 11, max(obs.profile_deviation), 1e-4 * ctx.loose),
        _le("bound_state_phase", 11, phase_err, 1e-3 * ctx.loose, "|arg u(t,0) + omega t|"),
        _le("gaussian_mass_conservation", 11, mass_drift(gobs), 1e-10),
        _le("gaussian_energy_conservation", 11, energy_drift(gobs), 1e-6 * ctx.loose),
        _ge("strang_rate", 11, strang_rate(gauss, ctx.gamma), 1.8),
    ]


def gradient_fd_error(n: int = 1025, gamma: float = 1.0, seed: int = 1, eps: float = 1e-5):
    rng = np.random.default_rng(seed)
    grid = symmetric_grid(12.0, n)
    x = grid.x
    u = np.exp(-0.3 * x**2) * (1 + 0.3 * np.sin(1.7 * x)) + 0.2 * np.exp(-(x - 2) ** 2)
    u[0] = u[-1] = 0.0
    worst = 0.0
    for _ in range(3):
        d = rng.standard_normal(n)
        d[0] = d[-1] = 0.0
        uf = Field(grid, u)
        g = energy_gradient(uf, gamma).values
        lin = float(np.dot(grid.weights, g * d))
        ep = total_energy(Field(grid, u + eps * d), gamma).E
        em = total_energy(Field(grid, u - eps * d), gamma).E
        worst = max(worst, abs(lin - (ep - em) / (2 * eps)))
    return worst


def rk4_observed_order(a: float = 1.5584, x_end: float = 5.0, hs=(0.04, 0.02, 0.01)):
    """Observed order from three step sizes; near the bound-state amplitude the
    march stays bounded up to x_end, away from it the blow-up spoils the rate."""
    ends = []
    for h in hs:
        t = integrate_ode(OdeState(0.0, a, 0.0, 0.0, 0.0), 1.0, x_end, h)
        ends.append(np.array([t.phi[-1], t.dphi[-1], t.v[-1], t.dv[-1]]))
    e1 = np.max(np.abs(ends[0] - ends[1]))
    e2 = np.max(np.abs(ends[1] - ends[2]))
    return math.log2(e1 / e2)


def coulomb_oracle_error(count: int = 50, n: int = 257, seed: int = 2):
    rng = np.random.default_rng(seed)
    grid = symmetric_grid(5.0, n)
    worst = 0.0
    for _ in range(count):
        rho = Field(grid, rng.uniform(0.0, 1.0, n))
        fast = coulomb_potential(rho).values
        slow = coulomb_potential_reference(rho).values
        worst = max(worst, float(np.max(np.abs(fast - slow)) / np.max(np.abs(slow))))
    return worst


def check_infrastructure(ctx: Context) -> List[Check]:
    return [
        _le("coulomb_prefix_vs_oracle", 12, coulomb_oracle_error(), 1e-12),
        _le("gradient_finite_difference", 12, gradient_fd_error(), 1e-6),
        _ge("rk4_observed_order", 12, rk4_observed_order(ctx.ground.shoot_param), 3.8),
    ]


ALL_CHECKS: List[Callable[[Context], List[Check]]] = [
    check_virial,
    check_energy_ratio,
    check_scaling,
    check_minimization_scaling,
    check_cross_method,
    check_hamiltonian,
    check_indefinite_form,
    check_rearrangement,
    check_ordering,
    check_uniqueness,
    check_dynamics,
    check_infrastructure,
]


@dataclass
class Report:
    checks: List[Check] = field(default_factory=list)
    wall_time: float = 0.0
    quick: bool = False

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "quick": self.quick,
            "passed": self.passed,
            "n_checks": len(self.checks),
            "checks": [c.as_dict() for c in self.checks],
        }

    def table(self) -> str:
        lines = [f"{'check':40s} {'crit':>4s} {'value':>12s} {'bound':>10s}  result"]
        for c in self.checks:
            lines.append(f"{c.name:40s} {c.criterion:4d} {c.value:12.4e} {c.bound:10.3g}  "
                         f"{'PASS' if c.passed else 'FAIL'}")
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} passed "
                     f"in {self.wall_time:.1f} s")
        return "\n".join(lines)


QUICK_SUBSET = {check_virial, check_energy_ratio, check_scaling, check_cross_method,
                check_hamiltonian, check_indefinite_form, check_rearrangement,
                check_ordering, check_dynamics, check_infrastructure,
                check_minimization_scaling}


def run_all(quick: bool = False, gamma: float = 1.0, ctx: Optional[Context] = None) -> Report:
    ctx = ctx or Context(quick=quick, gamma=gamma)
    start = time.perf_counter()
    report = Report(quick=quick)
    for fn in ALL_CHECKS:
        if quick and fn not in QUICK_SUBSET:
            continue
        report.checks.extend(fn(ctx))
    report.wall_time = time.perf_counter() - start
    return report
