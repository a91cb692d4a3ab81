"""A small language for naming initial conditions.

    const:c               u = c
    linear:k=K            u = 2 pi K x
    cosmode:a=A,n=N,k=K   v = K pi + A cos(2 pi N x), u = 2 d^-1 v
    wfam:k=K,r=R          the piecewise-linear Sing family
    file:path             JSON {"side": "u" | "v", "k": K, "values": [...]}

Every spec resolves to a pair (u, v) with v = u_x / 2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import spectral as sp
from .errors import SpecParseError
from .phase_space import SingFamilyParams, sing_family_w
from .spectral import WindingFunction

FAMILIES = ("const", "linear", "cosmode", "wfam", "file")


@dataclass(frozen=True)
class InitialCondition:
    spec: str
    u: WindingFunction
    v: np.ndarray


def _params(body: str, allowed: dict) -> dict:
    out = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in allowed:
            raise SpecParseError(f"unexpected parameter {item!r}; expected {sorted(allowed)}")
        try:
            out[key] = allowed[key](val.strip())
        except ValueError as err:
            raise SpecParseError(f"bad value for {key}: {val!r}") from err
    return out


def _integer(s: str) -> int:
    f = float(s)
    if f != int(f):
        raise ValueError(s)
    return int(f)


def _from_u(spec, u):
    return InitialCondition(spec, u, 0.5 * u.derivative())


def parse_ic(spec: str, n: int) -> InitialCondition:
    family, sep, body = spec.strip().partition(":")
    if not sep or family not in FAMILIES:
        raise SpecParseError(f"unknown initial condition {spec!r}; families are {FAMILIES}")
    sp.grid(n)
    x = sp.nodes(n)
    if family == "const":
        try:
            c = float(body)
        except ValueError as err:
            raise SpecParseError(f"const needs a number, got {body!r}") from err
        return InitialCondition(spec, WindingFunction(0, np.full(n, c)), np.zeros(n))
    if family == "linear":
        p = _params(body, {"k": _integer})
        k = p.get("k", 1)
        return InitialCondition(spec, WindingFunction(k, np.zeros(n)), np.full(n, np.pi * k))
    if family == "cosmode":
        p = _params(body, {"a": float, "n": _integer, "k": _integer})
        a, m, k = p.get("a", 0.1), p.get("n", 1), p.get("k", 0)
        if m < 1 or m >= n // 2:
            raise SpecParseError(f"mode n={m} is not resolved on a grid of {n}")
        v = np.pi * k + a * np.cos(2 * np.pi * m * x)
        return InitialCondition(spec, sp.lift(v), v)
    if family == "wfam":
        p = _params(body, {"k": _integer, "r": float})
        try:
            params = SingFamilyParams(p.get("k", 1), p.get("r", 0.5))
        except ValueError as err:
            raise SpecParseError(str(err)) from err
        return _from_u(spec, sing_family_w(params, n))
    return _read_file(spec, body, n)


def _read_file(spec, path, n):
    try:
        data = json.loads(Path(path).read_text())
        side = data.get("side", "u")
        k = int(data.get("k", 0))
        values = np.asarray(data["values"], dtype=float)
    except (OSError, KeyError, TypeError, ValueError) as err:
        raise SpecParseError(f"cannot read initial condition from {path!r}: {err}") from err
    if side not in ("u", "v"):
        raise SpecParseError("side must be 'u' or 'v'")
    if len(values) != n:
        # resample the periodic part only
        ramp = (lambda m: 2 * np.pi * k * sp.nodes(m)) if side == "u" else (lambda m: 0.0)
        values = sp.resample(values - ramp(len(values)), n) + ramp(n)
    if side == "v":
        return InitialCondition(spec, sp.lift(values), values)
    return _from_u(spec, WindingFunction.from_values(values, k))
