"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 bracket or convergence
failure, 3 iteration limit reached (best iterate still written).

Precedence: command-line flags > ``--config`` file (``key = value``) >
built-in defaults.  ``--out STEM`` writes ``STEM.json`` plus
``STEM_profile.csv`` / ``STEM_observables.csv`` / ``STEM_final.csv`` as
appropriate; ``--format`` selects what goes to stdout.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import io
from .dynamics import energy_drift, evolve, mass_drift
from .errors import NoBracket, NonConvergent, SN1DError
from .field_core import Field, make_grid, resample
from .minimizer import MinimizeConfig, default_initial, minimize
from .shooting import find_state, rescale_state
from .validation import run_all

EXIT_OK, EXIT_CONFIG, EXIT_BRACKET, EXIT_MAXITER = 0, 1, 2, 3

COMMAND_DEFAULTS = {
    "solve-ground": dict(xmin=-25.0, xmax=25.0, n=5001),
    "solve-excited": dict(xmin=-25.0, xmax=25.0, n=5001, parity="odd", nodes=0),
    "minimize": dict(xmin=-32.0, xmax=32.0, n=8193, lam=1.0, parity="free"),
    "evolve": dict(xmin=-40.0, xmax=40.0, n=2049, dt=1e-3, tfinal=1.0, init="ground"),
    "validate": dict(),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    xmin: float = -25.0
    xmax: float = 25.0
    n: int = 5001
    gamma: float = 1.0
    omega: Optional[float] = None
    lam: Optional[float] = None
    parity: str = "even"
    nodes: int = 0
    dt: float = 1e-3
    tfinal: float = 1.0
    tol: float = 1e-8
    max_iter: int = 5000
    h: float = 1e-3
    sample_every: int = 10
    init: str = "ground"
    profile: Optional[str] = None
    out: Optional[str] = None
    format: str = "json"
    quick: bool = False

    def validate(self) -> "RunConfig":
        if self.n < 3:
            raise ConfigError(f"--n must be at least 3 (got {self.n})")
        if not self.xmin < self.xmax:
            raise ConfigError("--xmin must be smaller than --xmax")
        if not self.gamma > 0:
            raise ConfigError("--gamma must be positive")
        if self.omega is not None and not self.omega > 0:
            raise ConfigError("--omega must be positive")
        if self.lam is not None and not self.lam > 0:
            raise ConfigError("--lambda must be positive")
        if self.omega is not None and self.lam is not None and self.command != "minimize":
            raise ConfigError("give at most one of --omega and --lambda")
        allowed = {"solve-excited": ("even", "odd"), "minimize": ("free", "even", "odd")}
        if self.command in allowed and self.parity not in allowed[self.command]:
            raise ConfigError(f"--parity must be one of {allowed[self.command]}")
        if not 0 <= self.nodes <= 5:
            raise ConfigError("--nodes must lie in 0..5")
        if not self.dt > 0:
            raise ConfigError("--dt must be positive")
        if self.tfinal < 0:
            raise ConfigError("--tfinal must be nonnegative")
        if not 0 < self.tol < 1:
            raise ConfigError("--tol must lie in (0, 1)")
        if self.max_iter < 1:
            raise ConfigError("--max-iter must be at least 1")
        if not self.h > 0:
            raise ConfigError("h must be positive")
        if self.sample_every < 1:
            raise ConfigError("sample_every must be at least 1")
        if self.init not in ("ground", "gaussian", "odd-gaussian"):
            raise ConfigError("--init must be ground, gaussian or odd-gaussian")
        if self.format not in ("json", "csv"):
            raise ConfigError("--format must be json or csv")
        return self

    @property
    def grid(self):
        return make_grid(self.xmin, self.xmax, self.n)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value):
    kind = _TYPES[key]
    if isinstance(value, str):
        if "bool" in kind:
            return value.strip().lower() in ("1", "true", "yes", "on")
        if "int" in kind:
            return int(value)
        if "float" in kind:
            return float(value)
    return value


def build_config(command: str, flags: dict, config_path: Optional[str] = None) -> RunConfig:
    merged = dict(COMMAND_DEFAULTS.get(command, {}))
    if config_path is not None:
        try:
            file_values = io.read_config(config_path)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        for key, value in file_values.items():
            key = "lam" if key == "lambda" else key
            if key not in _TYPES or key == "command":
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = value
    merged.update({k: v for k, v in flags.items() if v is not None})
    try:
        values = {k: _coerce(k, v) for k, v in merged.items()}
    except ValueError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    return RunConfig(command=command, **values).validate()


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sn1d", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("solve-ground", "symmetric ground state by shooting"),
        ("solve-excited", "state of given parity and half-line node count by shooting"),
        ("minimize", "constrained energy minimization at fixed N"),
        ("evolve", "time-dependent propagation with conservation monitoring"),
        ("validate", "run the identity and oracle suite"),
    ]:
        s = sub.add_parser(name, help=help_)
        s.add_argument("--xmin", type=float)
        s.add_argument("--xmax", type=float)
        s.add_argument("--n", type=int)
        s.add_argument("--gamma", type=float)
        s.add_argument("--omega", type=float)
        s.add_argument("--lambda", dest="lam", type=float)
        s.add_argument("--parity")
        s.add_argument("--nodes", type=int)
        s.add_argument("--dt", type=float)
        s.add_argument("--tfinal", type=float)
        s.add_argument("--tol", type=float)
        s.add_argument("--max-iter", dest="max_iter", type=int)
        s.add_argument("--init")
        s.add_argument("--profile", help="initial field CSV for evolve")
        s.add_argument("--out", help="output path stem")
        s.add_argument("--format", choices=("json", "csv"))
        s.add_argument("--quick", action="store_true", default=None)
        s.add_argument("--config", help="key = value configuration file")
    return p


def _emit(cfg: RunConfig, summary: dict, csvs: dict, main_csv: str) -> None:
    text = io.dumps(summary) + "\n"
    if cfg.out:
        io.write_text(cfg.out + ".json", text)
        for suffix, body in csvs.items():
            io.write_text(f"{cfg.out}_{suffix}.csv", body)
    sys.stdout.write(text if cfg.format == "json" else csvs[main_csv])


def _state_summary(state) -> dict:
    out = state.summary()
    out["full_line_nodes"] = state.full_line_nodes
    return out


def _shoot(cfg: RunConfig, parity: str, nodes: int):
    x_max = max(abs(cfg.xmin), abs(cfg.xmax))
    state = find_state(parity, nodes, cfg.gamma, x_max=x_max, h=cfg.h)
    if cfg.omega is not None:
        state = rescale_state(state, omega=cfg.omega)
    elif cfg.lam is not None:
        state = rescale_state(state, N=cfg.lam)
    return state


def _write_state(cfg: RunConfig, state, extra: Optional[dict] = None) -> None:
    summary = _state_summary(state)
    summary.update(extra or {})
    profile = resample(state.profile, cfg.grid)
    _emit(cfg, summary, {"profile": io.profile_csv(profile)}, "profile")


def cmd_solve_ground(cfg: RunConfig) -> int:
    _write_state(cfg, _shoot(cfg, "even", 0))
    return EXIT_OK


def cmd_solve_excited(cfg: RunConfig) -> int:
    _write_state(cfg, _shoot(cfg, cfg.parity, cfg.nodes))
    return EXIT_OK


def cmd_minimize(cfg: RunConfig) -> int:
    parity = "odd" if cfg.parity == "odd" else "free"
    lam = cfg.lam if cfg.lam is not None else 1.0
    mcfg = MinimizeConfig(lam=lam, gamma=cfg.gamma, grad_tol=cfg.tol,
                          max_iter=cfg.max_iter, parity=parity)
    state = minimize(mcfg, grid=cfg.grid)
    _write_state(cfg, state, {"iterations": state.iterations, "final_residual": state.residual})
    return EXIT_OK if state.converged else EXIT_MAXITER


def _initial_field(cfg: RunConfig):
    grid = cfg.grid
    if cfg.profile:
        x, values = io.read_profile_csv(cfg.profile)
        src = make_grid(x[0], x[-1], len(x))
        return resample(Field(src, values), grid), None
    if cfg.init == "ground":
        state = _shoot(cfg, "even", 0)
        return resample(state.profile, grid), state
    lam = cfg.lam if cfg.lam is not None else 1.0
    return default_initial(grid, lam, "odd" if cfg.init == "odd-gaussian" else "free"), None


def cmd_evolve(cfg: RunConfig) -> int:
    u0, state = _initial_field(cfg)
    u, obs = evolve(u0, cfg.gamma, cfg.tfinal, cfg.dt, sample_every=cfg.sample_every)
    summary = {
        "gamma": cfg.gamma,
        "dt": cfg.dt,
        "t_final": cfg.tfinal,
        "samples": len(obs.times),
        "N_final": obs.N_series[-1],
        "E_final": obs.E_series[-1],
        "mass_drift": mass_drift(obs),
        "energy_drift": energy_drift(obs),
        "max_deviation": max(obs.profile_deviation),
    }
    if state is not None:
        phase = obs.unwrapped_phase()
        summary["omega"] = state.omega
        summary["max_phase_error"] = float(
            np.max(np.abs(phase + state.omega * np.asarray(obs.times))))
    _emit(cfg, summary,
          {"observables": io.observables_csv(obs), "final": io.complex_csv(u)},
          "observables")
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    report = run_all(quick=cfg.quick, gamma=cfg.gamma)
    text = io.dumps(report.as_dict()) + "\n"
    if cfg.out:
        io.write_text(cfg.out + ".json", text)
    if cfg.format == "json":
        sys.stdout.write(text)
    else:
        print(report.table())
    return EXIT_OK if report.passed else EXIT_BRACKET


COMMANDS = {
    "solve-ground": cmd_solve_ground,
    "solve-excited": cmd_solve_excited,
    "minimize": cmd_minimize,
    "evolve": cmd_evolve,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = build_config(args.command, flags, args.config)
    except ConfigError as exc:
        print(f"sn1d: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate" and cfg.format == "json" and "format" not in {
        k for k, v in flags.items() if v is not None
    }:
        # human table by default for the suite
        cfg.format = "csv"
    try:
        return COMMANDS[args.command](cfg)
    except (NoBracket, NonConvergent) as exc:
        print(f"sn1d: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except (ValueError, OSError) as exc:
        print(f"sn1d: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SN1DError as exc:
        print(f"sn1d: {exc}", file=sys.stderr)
        return EXIT_BRACKET


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
