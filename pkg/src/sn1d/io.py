"""JSON / CSV writers with fixed 17-significant-digit float formatting.

Frozen headers: stationary profiles ``x,phi,V_conv`` (V_conv is the convolution
potential 1/2 |x| * phi^2), time series ``t,N,E,deviation`` and evolved
complex fields ``x,re,im``.  UTF-8 with LF line endings.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .field_core import Field, signed_potential

PROFILE_HEADER = "x,phi,V_conv"
OBSERVABLES_HEADER = "t,N,E,deviation"
COMPLEX_HEADER = "x,re,im"


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON text; floats always carry 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def profile_csv(profile: Field) -> str:
    rho = profile.density().values
    v = signed_potential(profile.grid, rho)
    lines = [PROFILE_HEADER]
    for x, p, vv in zip(profile.grid.x, np.real(profile.values), v):
        lines.append(f"{fmt(x)},{fmt(p)},{fmt(vv)}")
    return "\n".join(lines) + "\n"


def complex_csv(u: Field) -> str:
    lines = [COMPLEX_HEADER]
    vals = np.asarray(u.values, dtype=complex)
    for x, z in zip(u.grid.x, vals):
        lines.append(f"{fmt(x)},{fmt(z.real)},{fmt(z.imag)}")
    return "\n".join(lines) + "\n"


def observables_csv(obs) -> str:
    lines = [OBSERVABLES_HEADER]
    for t, n, e, d in obs.rows():
        lines.append(f"{fmt(t)},{fmt(n)},{fmt(e)},{fmt(d)}")
    return "\n".join(lines) + "\n"


def read_profile_csv(path):
    """Read back ``x,phi,V_conv`` (or ``x,re,im``); returns (x, values)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if header == PROFILE_HEADER:
        return data[:, 0], data[:, 1]
    if header == COMPLEX_HEADER:
        return data[:, 0], data[:, 1] + 1j * data[:, 2]
    raise ValueError(f"unrecognized profile header {header!r}")


def read_config(path) -> dict:
    """``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out
