"""Shooting for bound states of the stationary system

    -phi'' + gamma V phi = phi,    V'' = phi^2,

started from x = 0 with V(0) = V'(0) = 0 and either (phi, phi') = (a, 0)
(even states) or (0, b) (odd states).  Along every solution the quantity

    H = phi'^2 + phi^2 + gamma/2 V'^2 - gamma V phi^2

is conserved, which is the accuracy monitor for the fixed-step RK4 march.
The V(0) = 0 gauge differs from the convolution potential 1/2 (|x| * phi^2)
by the constant c = integral_0^inf y phi^2 dy, so the frequency of the
corresponding bound state is omega = 1 + gamma c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateState,
    InvalidStep,
    MeshMismatch,
    NoBracket,
    NonConvergent,
)
from .field_core import Field, symmetric_grid
from .functionals import total_energy
from .states import Parity, StationaryState

DEFAULT_H = 1e-3
DEFAULT_X_MAX = 25.0
BLOWUP_FACTOR = 1e6
DECAY_THRESHOLD = 1e-10
TAIL_FRACTION = 1e-3


class OdeState(NamedTuple):
    x: float
    phi: float
    dphi: float
    v: float
    dv: float


def ode_rhs(s: OdeState, gamma: float = 1.0) -> tuple:
    return (s.dphi, gamma * s.v * s.phi - s.phi, s.dv, s.phi * s.phi)


def ode_energy(s, gamma: float = 1.0):
    """Conserved quantity of the stationary system; works on arrays too."""
    phi, dphi, v, dv = s.phi, s.dphi, s.v, s.dv
    return dphi**2 + phi**2 + 0.5 * gamma * dv**2 - gamma * v * phi**2


@dataclass(frozen=True)
class Trajectory:
    x: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    gamma: float
    h: float
    node_count: int
    outcome: str  # decayed | diverged_plus | diverged_minus | exhausted

    def __len__(self):
        return len(self.x)

    def state(self, i: int) -> OdeState:
        return OdeState(self.x[i], self.phi[i], self.dphi[i], self.v[i], self.dv[i])

    @property
    def states(self) -> list:
        return [self.state(i) for i in range(len(self))]

    @property
    def energy(self) -> np.ndarray:
        return ode_energy(self, self.gamma)

    def drift(self, upto: Optional[int] = None) -> float:
        """max |H - H(0)| / max(1, |H(0)|) over states [0, upto]."""
        e = self.energy[: None if upto is None else upto + 1]
        return float(np.max(np.abs(e - e[0])) / max(1.0, abs(e[0])))

    @property
    def hamiltonian_drift(self) -> float:
        return self.drift()

    @property
    def diverged(self) -> bool:
        return self.outcome.startswith("diverged")

    def tail_cut(self, fraction: float = TAIL_FRACTION) -> Optional[int]:
        """Last index where |phi| is below ``fraction`` of its peak and still
        decreasing; the march is trusted up to there only."""
        a = np.abs(self.phi)
        peak = a.max()
        if peak == 0:
            return None
        dec = np.zeros(len(a), dtype=bool)
        dec[1:] = a[1:] < a[:-1]
        idx = np.nonzero(dec & (a < fraction * peak))[0]
        if len(idx) == 0:
            return None
        return int(idx[-1])


def integrate_ode(
    init: OdeState,
    gamma: float = 1.0,
    x_max: float = DEFAULT_X_MAX,
    h: float = DEFAULT_H,
    blowup: float = BLOWUP_FACTOR,
    decay: float = DECAY_THRESHOLD,
) -> Trajectory:
    """Classic RK4 march from ``init.x`` to ``x_max`` with early termination."""
    if not (h > 0) or not math.isfinite(h):
        raise InvalidStep(f"step must be positive, got {h}")
    if not x_max > init.x:
        raise InvalidStep(f"x_max={x_max} must exceed the start {init.x}")
    steps = int(round((x_max - init.x) / h))
    if steps < 1:
        raise InvalidStep("integration range shorter than one step")
    g = float(gamma)
    p, dp, v, dv = float(init.phi), float(init.dphi), float(init.v), float(init.dv)
    amp0 = max(abs(p), abs(dp))
    limit = blowup * amp0 if amp0 > 0 else math.inf
    P, DP, VV, DV = [p], [dp], [v], [dv]
    sign = (p > 0) - (p < 0)
    nodes = 0
    outcome = "exhausted"
    hh = 0.5 * h
    h6 = h / 6.0
    for _ in range(steps):
        k1p, k1d, k1v, k1w = dp, (g * v - 1.0) * p, dv, p * p
        p2, d2, v2, w2 = p + hh * k1p, dp + hh * k1d, v + hh * k1v, dv + hh * k1w
        k2p, k2d, k2v, k2w = d2, (g * v2 - 1.0) * p2, w2, p2 * p2
        p3, d3, v3, w3 = p + hh * k2p, dp + hh * k2d, v + hh * k2v, dv + hh * k2w
        k3p, k3d, k3v, k3w = d3, (g * v3 - 1.0) * p3, w3, p3 * p3
        p4, d4, v4, w4 = p + h * k3p, dp + h * k3d, v + h * k3v, dv + h * k3w
        k4p, k4d, k4v, k4w = d4, (g * v4 - 1.0) * p4, w4, p4 * p4
        p += h6 * (k1p + 2.0 * (k2p + k3p) + k4p)
        dp += h6 * (k1d + 2.0 * (k2d + k3d) + k4d)
        v += h6 * (k1v + 2.0 * (k2v + k3v) + k4v)
        dv += h6 * (k1w + 2.0 * (k2w + k3w) + k4w)
        P.append(p)
        DP.append(dp)
        VV.append(v)
        DV.append(dv)
        s = (p > 0) - (p < 0)
        if s != 0:
            if sign != 0 and s != sign:
                nodes += 1
            sign = s
        if abs(p) > limit or not math.isfinite(p):
            outcome = "diverged_plus" if p > 0 else "diverged_minus"
            break
        if sign != 0 and abs(p) + abs(dp) < decay:
            outcome = "decayed"
            break
    m = len(P)
    x = init.x + h * np.arange(m)
    return Trajectory(
        x=x,
        phi=np.array(P),
        dphi=np.array(DP),
        v=np.array(VV),
        dv=np.array(DV),
        gamma=g,
        h=h,
        node_count=nodes,
        outcome=outcome,
    )


def shoot_symmetric(a: float, gamma: float = 1.0, x_max: float = DEFAULT_X_MAX,
                    h: float = DEFAULT_H, **kw) -> Trajectory:
    if not a > 0:
        raise ValueError(f"symmetric shot needs phi(0) > 0, got {a}")
    return integrate_ode(OdeState(0.0, a, 0.0, 0.0, 0.0), gamma, x_max, h, **kw)


def shoot_antisymmetric(b: float, gamma: float = 1.0, x_max: float = DEFAULT_X_MAX,
                        h: float = DEFAULT_H, **kw) -> Trajectory:
    if not b > 0:
        raise ValueError(f"antisymmetric shot needs phi'(0) > 0, got {b}")
    return integrate_ode(OdeState(0.0, 0.0, b, 0.0, 0.0), gamma, x_max, h, **kw)


def _shoot(parity: Parity, param: float, gamma, x_max, h, **kw) -> Trajectory:
    if parity == "even":
        return shoot_symmetric(param, gamma, x_max, h, **kw)
    if parity == "odd":
        return shoot_antisymmetric(param, gamma, x_max, h, **kw)
    raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


def half_line_mass(traj: Trajectory, cut: Optional[int] = None) -> float:
    end = len(traj) if cut is None else cut + 1
    return float(np.trapezoid(traj.phi[:end] ** 2, dx=traj.h))


def gauge_omega(traj: Trajectory, gamma: Optional[float] = None,
                ode_eigenvalue: float = 1.0, cut: Optional[int] = None) -> float:
    """Frequency of the bound state in the convolution gauge.

    Only the trusted part of the trajectory (up to :meth:`Trajectory.tail_cut`)
    enters the shift c = integral_0^inf y phi(y)^2 dy.
    """
    gamma = traj.gamma if gamma is None else gamma
    if cut is None:
        cut = traj.tail_cut()
        if cut is None:
            cut = len(traj) - 1
    if half_line_mass(traj, cut) < 1e-14:
        raise DegenerateState("trajectory carries no mass")
    sl = slice(0, cut + 1)
    c = float(np.trapezoid(traj.x[sl] * traj.phi[sl] ** 2, dx=traj.h))
    return ode_eigenvalue + gamma * c


def profile_gauge_omega(profile: Field, gamma: float, ode_eigenvalue: float) -> float:
    """Same shift computed from a full-line profile: omega = e + gamma/2 int |y| phi^2."""
    rho = profile.density().values
    if np.dot(profile.grid.weights, rho) < 1e-14:
        raise DegenerateState("profile carries no mass")
    return ode_eigenvalue + 0.5 * gamma * float(
        np.dot(profile.grid.weights, np.abs(profile.grid.x) * rho)
    )


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    # +1 when the larger parameter has at most k half-line nodes
    orientation: int


def default_scan(parity: Parity) -> np.ndarray:
    return np.geomspace(0.02, 50.0, 29)


def _at_most(traj: Trajectory, k: int) -> bool:
    return traj.node_count <= k


def scan_bracket(parity: Parity, k: int, gamma: float = 1.0, x_max: float = DEFAULT_X_MAX,
                 h: float = DEFAULT_H, values: Optional[Sequence[float]] = None,
                 **kw) -> Bracket:
    """Coarse scan for the transition between k and k+1 half-line nodes."""
    values = np.sort(np.asarray(default_scan(parity) if values is None else values, float))
    flags = [_at_most(_shoot(parity, a, gamma, x_max, h, **kw), k) for a in values]
    # walk downward from the largest value: the first flip is the k-node state
    for i in range(len(values) - 1, 0, -1):
        if flags[i] != flags[i - 1]:
            return Bracket(float(values[i - 1]), float(values[i]), 1 if flags[i] else -1)
    raise NoBracket(
        f"no {parity} bracket with {k} half-line nodes in [{values[0]:g}, {values[-1]:g}]"
    )


def bisect_bracket(parity: Parity, k: int, bracket: Bracket, gamma: float = 1.0,
                   x_max: float = DEFAULT_X_MAX, h: float = DEFAULT_H,
                   rel_tol: float = 1e-12, max_iter: int = 200, **kw):
    """Bisection on the shooting parameter; returns (parameter, trajectory)."""
    lo, hi = bracket.lo, bracket.hi
    t_lo = _shoot(parity, lo, gamma, x_max, h, **kw)
    t_hi = _shoot(parity, hi, gamma, x_max, h, **kw)
    f_lo, f_hi = _at_most(t_lo, k), _at_most(t_hi, k)
    if f_lo == f_hi:
        raise NoBracket(f"[{lo:g}, {hi:g}] does not bracket a {k}-node {parity} state")
    for _ in range(max_iter):
        if hi - lo <= rel_tol * abs(hi):
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        t_mid = _shoot(parity, mid, gamma, x_max, h, **kw)
        if t_mid.outcome == "decayed" and t_mid.node_count == k:
            return mid, t_mid
        if _at_most(t_mid, k) == f_lo:
            lo, t_lo = mid, t_mid
        else:
            hi, t_hi = mid, t_mid
    else:
        raise NonConvergent(f"bisection did not reach rel_tol={rel_tol:g}")
    # keep the side without the spurious extra crossing
    return (lo, t_lo) if f_lo else (hi, t_hi)


def profile_from_trajectory(traj: Trajectory, parity: Parity, cut: int,
                            x_max: float = DEFAULT_X_MAX) -> Field:
    """Reflect the trusted half-line part by parity and zero-pad the tail."""
    steps = max(cut, int(round(x_max / traj.h)))
    grid = symmetric_grid(steps * traj.h, 2 * steps + 1)
    half = np.zeros(steps + 1)
    half[: cut + 1] = traj.phi[: cut + 1]
    sign = 1.0 if parity == "even" else -1.0
    values = np.concatenate((sign * half[:0:-1], half))
    if parity == "odd":
        values[steps] = 0.0
    return Field(grid, values)


def find_state(parity: Parity = "even", target_nodes_halfline: int = 0, gamma: float = 1.0,
               x_max: float = DEFAULT_X_MAX, h: float = DEFAULT_H,
               bracket: Optional[tuple] = None, scan: Optional[Sequence[float]] = None,
               rel_tol: float = 1e-12, **kw) -> StationaryState:
    """Locate the bound state of given parity and half-line node count."""
    if not gamma > 0:
        raise ValueError("coupling must be positive")
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    k = int(target_nodes_halfline)
    if bracket is None:
        br = scan_bracket(parity, k, gamma, x_max, h, scan, **kw)
    else:
        br = Bracket(float(min(bracket)), float(max(bracket)), 0)
    param, traj = bisect_bracket(parity, k, br, gamma, x_max, h, rel_tol=rel_tol, **kw)
    if traj.node_count != k:
        raise NonConvergent(f"converged trajectory has {traj.node_count} nodes, wanted {k}")
    cut = traj.tail_cut()
    if cut is None:
        raise NonConvergent("trajectory tail never decayed below the truncation level")
    profile = profile_from_trajectory(traj, parity, cut, x_max)
    breakdown = total_energy(profile, gamma)
    return StationaryState(
        profile=profile,
        omega=gauge_omega(traj, gamma, cut=cut),
        gamma=gamma,
        breakdown=breakdown,
        node_count=k,
        parity=parity,
        method="shooting",
        shoot_param=param,
        trajectory=traj,
    )


def rescale_state(s: StationaryState, omega: Optional[float] = None,
                  N: Optional[float] = None) -> StationaryState:
    """phi -> r phi(sqrt(r) x): omega scales by r, N by r^(3/2), E by r^(5/2)."""
    if (omega is None) == (N is None):
        raise ValueError("give exactly one of omega or N")
    target = omega if omega is not None else N
    if not target > 0:
        raise ValueError(f"rescaling target must be positive, got {target}")
    if omega is not None:
        r = omega / s.omega
    else:
        r = (N / s.breakdown.N) ** (2.0 / 3.0)
    if r == 1.0:
        return s
    grid = s.profile.grid
    values = r * np.interp(math.sqrt(r) * grid.x, grid.x, s.profile.values, left=0.0, right=0.0)
    profile = Field(grid, values)
    param = None
    if s.shoot_param is not None:
        param = s.shoot_param * (r if s.parity == "even" else r**1.5)
    return s.replace(
        profile=profile,
        omega=r * s.omega,
        breakdown=total_energy(profile, s.gamma),
        shoot_param=param,
        trajectory=None,
    )


def absorb_coupling(s: StationaryState, gamma_new: float) -> StationaryState:
    """Map a state of coupling gamma to gamma_new; amplitudes scale by sqrt(gamma/gamma_new)."""
    if not gamma_new > 0:
        raise ValueError(f"coupling must be positive, got {gamma_new}")
    if gamma_new == s.gamma:
        return s
    c = math.sqrt(s.gamma / gamma_new)
    profile = s.profile.with_values(c * s.profile.values)
    return s.replace(
        profile=profile,
        gamma=gamma_new,
        breakdown=total_energy(profile, gamma_new),
        shoot_param=None if s.shoot_param is None else c * s.shoot_param,
        trajectory=None,
    )


def _derivative4(f: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative (one-sided at the ends)."""
    if len(f) < 5:
        return np.gradient(f, h)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    c0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * h)
    c1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12.0 * h)
    d[0] = c0 @ f[:5]
    d[1] = c1 @ f[:5]
    d[-1] = -(c0 @ f[-1:-6:-1])
    d[-2] = -(c1 @ f[-1:-6:-1])
    return d


@dataclass(frozen=True)
class WronskianReport:
    x: np.ndarray
    w: np.ndarray
    residual: float
    w0: float
    ordered_until: int
    monotone_where_ordered: bool


def wronskian_diagnostic(t1: Trajectory, t2: Trajectory, gamma: Optional[float] = None,
                         tol: float = 1e-12) -> WronskianReport:
    """w = u2' u1 - u1' u2 and the residual of w' = gamma (V2 - V1) u1 u2."""
    if t1.h != t2.h or t1.x[0] != t2.x[0]:
        raise MeshMismatch("trajectories are not on a common mesh")
    gamma = t1.gamma if gamma is None else gamma
    m = min(len(t1), len(t2))
    u1, u2 = t1.phi[:m], t2.phi[:m]
    w = t2.dphi[:m] * u1 - t1.dphi[:m] * u2
    rhs = gamma * (t2.v[:m] - t1.v[:m]) * u1 * u2
    dw = _derivative4(w, t1.h)
    residual = float(np.max(np.abs(dw - rhs)))
    # the monotonicity argument needs both solutions positive as well
    ordered = (u2 > u1) & (u1 > 0) & (t2.v[:m] >= t1.v[:m])
    # the ordering holds from the first step on; find where it first fails
    bad = np.nonzero(~ordered[1:])[0]
    until = int(bad[0]) if len(bad) else m - 1
    monotone = bool(np.all(np.diff(w[: until + 1]) >= -tol))
    return WronskianReport(t1.x[:m], w, residual, float(w[0]), until, monotone)
