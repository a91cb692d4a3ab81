"""Command-line runner: classify, evolve, discriminant, obstruction-scan, surface.

Configuration comes from an INI file (section [run], then the section named
after the subcommand) with command-line flags winning.  Every run writes the
effective configuration and a JSON report into the output directory, which is
taken from --out, then $SGMKDV_OUTDIR, then the config, then ./sgmkdv_out.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from math import gcd
from pathlib import Path

import numpy as np

from . import evolution as ev
from . import floquet as fq
from . import geometry as geo
from . import phase_space as ps
from .errors import (CompatibilityFailure, DegenerateMetric, NotOnMsin, NotOnMsinh,
                     OdeStepFailure, OnRamificationLocus, ResolutionLoss, SGError,
                     SpecParseError)
from .initial import parse_ic

SUBCOMMANDS = ("classify", "evolve", "discriminant", "obstruction-scan", "surface")
ENV_OUTDIR = "SGMKDV_OUTDIR"

EXIT_CODES = [
    (NotOnMsin, 2), (NotOnMsinh, 2),
    (SpecParseError, 3),
    (OnRamificationLocus, 4),
    (ResolutionLoss, 5),
    (OdeStepFailure, 6),
    (DegenerateMetric, 7), (CompatibilityFailure, 7),
]


@dataclass
class RunConfig:
    subcommand: str = "classify"
    n: int = 128
    equation: str = "sine_gordon"
    form: str = "v_form"
    ic: str = "cosmode:a=0.1,n=1,k=0"
    normalize: bool = True
    dt: float = 1e-3
    t_end: float = 1.0
    record_stride: int = 10
    snapshots: bool = False
    eps: float = ps.EPS_CLASSIFY
    tol: float = ps.TOL_CONSTRAINT
    tail_threshold: float = 1e-8
    lam_min: float = -5.0
    lam_max: float = 40.0
    lam_count: int = 10
    chain: str = "chodos"
    error_budget: float = fq.ERROR_BUDGET
    k_values: str = "1,2,3"
    r_count: int = 9
    patch: str = "kink"
    nx: int = 41
    nt: int = 41
    kink_a: float = 1.3
    amplitude: float = 0.8
    delta_range: float = geo.DELTA_RANGE
    residual_threshold: float = geo.RESIDUAL_THRESHOLD
    outdir: str = ""

    def __post_init__(self):
        checks = [
            (self.subcommand in SUBCOMMANDS, f"subcommand must be one of {SUBCOMMANDS}"),
            (self.n >= 8 and self.n % 2 == 0, "n must be even and >= 8"),
            (self.equation in ev.EQUATIONS, f"equation must be one of {ev.EQUATIONS}"),
            (self.form in ev.FORMS, f"form must be one of {ev.FORMS}"),
            (0 < self.dt <= self.t_end, "need 0 < dt <= t_end"),
            (self.record_stride >= 1, "record_stride must be positive"),
            (self.eps > 0 and self.tol > 0, "tolerances must be positive"),
            (self.lam_count >= 1 and self.lam_min <= self.lam_max, "bad lambda range"),
            (self.chain in fq.CHAINS, f"chain must be one of {fq.CHAINS}"),
            (self.r_count >= 1, "r_count must be positive"),
            (self.patch in ("kink", "nonsolution"), "patch must be 'kink' or 'nonsolution'"),
            (self.nx >= 5 and self.nt >= 5, "patch needs at least 5 points per direction"),
        ]
        for ok, msg in checks:
            if not ok:
                raise SpecParseError(msg)
        self.k_list()

    def k_list(self) -> list[int]:
        try:
            ks = [int(s) for s in self.k_values.split(",") if s.strip()]
        except ValueError as err:
            raise SpecParseError(f"bad k_values {self.k_values!r}") from err
        if not ks or min(ks) < 1:
            raise SpecParseError("k_values must be positive integers")
        return ks

    def lambdas(self) -> np.ndarray:
        return np.linspace(self.lam_min, self.lam_max, self.lam_count)

    def evolve_config(self) -> ev.EvolveConfig:
        return ev.EvolveConfig(self.dt, self.t_end, self.equation, self.form,
                               self.record_stride, self.eps, self.tail_threshold)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _convert(name, typ, raw):
    if not isinstance(raw, str):
        return raw
    try:
        if typ in (bool, "bool"):
            low = raw.strip().lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(raw)
            return low in ("1", "true", "yes", "on")
        if typ in (int, "int"):
            return int(raw)
        if typ in (float, "float"):
            return float(raw)
    except ValueError as err:
        raise SpecParseError(f"bad value for {name}: {raw!r}") from err
    return raw.strip()


def build_config(values: dict) -> RunConfig:
    known = {f.name: f.type for f in fields(RunConfig)}
    unknown = sorted(set(values) - set(known))
    if unknown:
        raise SpecParseError(f"unknown configuration keys {unknown}")
    return RunConfig(**{k: _convert(k, known[k], v) for k, v in values.items()})


def read_ini(path, subcommand: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as err:
        raise SpecParseError(f"cannot read config {path}: {err}") from err
    out = {}
    for section in ("run", subcommand):
        if parser.has_section(section):
            out.update({k.replace("-", "_"): v for k, v in parser.items(section)})
    return out


# -- output helpers ----------------------------------------------------------

def _num(x):
    """Round floats to 12 significant digits so reports compare byte for byte."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def write_json(path: Path, obj):
    path.write_text(json.dumps(_num(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{c:.12e}" if isinstance(c, (float, np.floating)) else c for c in row])


# -- subcommands -------------------------------------------------------------

def cmd_classify(cfg: RunConfig, out: Path) -> dict:
    ic = parse_ic(cfg.ic, cfg.n)
    cls = ps.classify(ic.u, cfg.eps)
    report = {
        "ic": cfg.ic,
        "K": [cls.moment.real, cls.moment.imag],
        "class": cls.tag.value,
        "K1": ps.obstruction_K1(ic.u, max(cfg.tol, cfg.eps)),
        "osc": ps.oscillation(ic.u),
        "charge": ic.u.k,
    }
    write_json(out / "report.json", report)
    return report


def _initial_state(cfg: RunConfig):
    ic = parse_ic(cfg.ic, cfg.n)
    if cfg.form == "v_form":
        return ic.v
    if not cfg.normalize:
        return ic.u
    return ps.psi_sg_plus(ic.v, cfg.eps) if cfg.equation == "sine_gordon" else ps.psi_sh(ic.v)


def _run(cfg: RunConfig):
    state = _initial_state(cfg)
    ecfg = cfg.evolve_config()
    return ev.evolve_v(state, ecfg) if cfg.form == "v_form" else ev.evolve_u_direct(state, ecfg)


def _trajectory_files(traj, cfg: RunConfig, out: Path):
    keys = ("H", "constraint", "mean_v", "tail", "mu", "cos_integral")
    cols = [traj.times] + [traj.series(k) for k in keys]
    write_csv(out / "diagnostics.csv", ("t",) + keys, zip(*cols))
    side = "v" if traj.form == "v_form" else "u"
    vals = [np.asarray(s if side == "v" else s.values) for s in traj.states]
    write_csv(out / "trajectory.csv", ("t", f"{side}_min", f"{side}_max", f"{side}_mean"),
              ((t, float(v.min()), float(v.max()), float(v.mean())) for t, v in zip(traj.times, vals)))
    if cfg.snapshots:
        x = np.arange(cfg.n) / cfg.n
        write_csv(out / "states.csv", ("t", "x", side),
                  ((t, float(xj), float(vj)) for t, v in zip(traj.times, vals) for xj, vj in zip(x, v)))
    if traj.mu_trace:
        write_csv(out / "mu_trace.csv", ("t", "mu"), traj.mu_trace)


def _summary(traj) -> dict:
    if not len(traj):
        return {"records": 0}
    H, mean_v = traj.series("H"), traj.series("mean_v")
    out = {
        "records": len(traj),
        "t_last": traj.times[-1],
        "max_abs_dH": float(np.max(np.abs(H - H[0]))),
        "max_abs_constraint": float(np.max(np.abs(traj.series("constraint")))),
        "mean_drift": float(np.max(np.abs(mean_v - mean_v[0]))),
        "max_tail": float(np.max(traj.series("tail"))),
    }
    if traj.mu_trace:
        out["max_abs_mu"] = traj.max_abs_mu
    return out


def _abort_report(err, cfg, out, report):
    if err.trajectory is not None:
        _trajectory_files(err.trajectory, cfg, out)
        report.update(_summary(err.trajectory))
    report.update({"aborted": True, "abort_time": err.time, "error": type(err).__name__,
                   "message": str(err)})
    write_json(out / "report.json", report)


def cmd_evolve(cfg: RunConfig, out: Path) -> dict:
    report = {"ic": cfg.ic, "equation": cfg.equation, "form": cfg.form,
              "dt": cfg.dt, "t_end": cfg.t_end, "steps": cfg.evolve_config().steps}
    try:
        traj = _run(cfg)
    except (OnRamificationLocus, ResolutionLoss) as err:
        _abort_report(err, cfg, out, report)
        raise
    _trajectory_files(traj, cfg, out)
    report.update(_summary(traj))
    report["aborted"] = False
    write_json(out / "report.json", report)
    return report


def cmd_discriminant(cfg: RunConfig, out: Path) -> dict:
    report = {"ic": cfg.ic, "equation": cfg.equation, "form": cfg.form, "chain": cfg.chain,
              "dt": cfg.dt, "t_end": cfg.t_end}
    try:
        traj = _run(cfg)
    except (OnRamificationLocus, ResolutionLoss) as err:
        _abort_report(err, cfg, out, report)
        raise
    lams = cfg.lambdas()
    table = fq.discriminant_table(traj, lams, cfg.chain, error_budget=cfg.error_budget)
    rows = ((t, lam, complex(d).real, complex(d).imag)
            for t, row in zip(traj.times, table) for lam, d in zip(lams, row))
    write_csv(out / "discriminant.csv", ("t", "lambda", "delta_re", "delta_im"), rows)
    drift = np.abs(table - table[0])
    report.update({
        "lambdas": list(lams),
        "records": len(traj),
        "max_drift": float(drift.max()),
        "max_drift_per_lambda": list(drift.max(axis=0)),
    })
    write_json(out / "report.json", report)
    return report


def scan_grid(cfg: RunConfig):
    """r_j = j / (r_count + 1) and the smallest even multiple of n on which they are nodes."""
    den = cfg.r_count + 1
    n = cfg.n * den // gcd(cfg.n, den)
    return n, [j / den for j in range(1, den)]


def cmd_obstruction_scan(cfg: RunConfig, out: Path) -> dict:
    n, rs = scan_grid(cfg)
    rows, per_k = [], {}
    for k in cfg.k_list():
        vals = []
        for r in rs:
            K1 = ps.obstruction_K1(ps.sing_family_w(ps.SingFamilyParams(k, r), n), cfg.tol)
            exact = ps.k1_closed_form(k, r)
            vals.append(K1)
            rows.append((k, r, K1, exact, abs(K1 - exact)))
        signs = np.sign(vals)
        changes = [[rs[i], rs[i + 1]] for i in range(len(rs) - 1) if signs[i] != signs[i + 1] or signs[i] == 0]
        per_k[str(k)] = {"root": ps.locate_k1_root(k), "root_closed_form": ps.k1_root(k),
                         "sign_changes": changes}
    write_csv(out / "scan.csv", ("k", "r", "K1", "closed_form", "abs_err"), rows)
    report = {"n": n, "r_values": rs, "per_k": per_k,
              "max_abs_err": max(row[-1] for row in rows)}
    write_json(out / "report.json", report)
    return report


def cmd_surface(cfg: RunConfig, out: Path) -> dict:
    if cfg.patch == "kink":
        patch = geo.kink_patch(cfg.nx, cfg.nt, a=cfg.kink_a)
    else:
        patch = geo.nonsolution_patch(cfg.nx, cfg.nt, cfg.amplitude)
    report = {"patch": patch.provenance, "nx": cfg.nx, "nt": cfg.nt}
    try:
        rec = geo.reconstruct_surface(patch, delta_range=cfg.delta_range,
                                      residual_threshold=cfg.residual_threshold)
    except CompatibilityFailure as err:
        report.update({"error": type(err).__name__, "residual": err.residual})
        write_json(out / "report.json", report)
        raise
    geo.export_obj(rec.mesh, out / "surface.obj")
    K = geo.discrete_gaussian_curvature(rec.mesh, patch.hx, patch.ht)
    ex, et = geo.edge_lengths(rec.mesh)
    report.update({
        "residual": rec.residual,
        "angle_error": rec.angle_error,
        "unit_error": rec.unit_error,
        "curvature": {"mean": float(K.mean()), "min": float(K.min()), "max": float(K.max()),
                      "std": float(K.std())},
        "edge_x_over_h": [float(ex.min() / patch.hx), float(ex.max() / patch.hx)],
        "edge_t_over_h": [float(et.min() / patch.ht), float(et.max() / patch.ht)],
    })
    write_json(out / "report.json", report)
    return report


COMMANDS = {
    "classify": cmd_classify,
    "evolve": cmd_evolve,
    "discriminant": cmd_discriminant,
    "obstruction-scan": cmd_obstruction_scan,
    "surface": cmd_surface,
}


# -- entry point -------------------------------------------------------------

FLAG_KEYS = ("n", "equation", "form", "ic", "dt", "t_end", "record_stride", "chain", "patch")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share exit code 3 with malformed configs
        raise SpecParseError(message)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sgmkdv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI file with [run] and [%s] sections" % name)
        p.add_argument("--out", help="output directory")
        p.add_argument("--n", help="grid size")
        p.add_argument("--equation", choices=ev.EQUATIONS)
        p.add_argument("--form", choices=ev.FORMS)
        p.add_argument("--ic", help="initial condition, e.g. cosmode:a=0.1,n=1,k=0")
        p.add_argument("--dt")
        p.add_argument("--t-end", dest="t_end")
        p.add_argument("--record-stride", dest="record_stride")
        p.add_argument("--chain", choices=fq.CHAINS)
        p.add_argument("--patch", choices=("kink", "nonsolution"))
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any configuration key")
    return parser


def resolve_config(args) -> RunConfig:
    values = {"subcommand": args.subcommand}
    if args.config:
        values.update(read_ini(args.config, args.subcommand))
    for key in FLAG_KEYS:
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    for item in args.set:
        key, sep, val = item.partition("=")
        if not sep:
            raise SpecParseError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip().replace("-", "_")] = val
    if args.out:
        values["outdir"] = args.out
    elif os.environ.get(ENV_OUTDIR):
        values["outdir"] = os.environ[ENV_OUTDIR]
    values["subcommand"] = args.subcommand
    cfg = build_config(values)
    if not cfg.outdir:
        cfg.outdir = "sgmkdv_out"
    return cfg


def exit_code(err: BaseException) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(err, cls):
            return code
    return 1


def _fail(err, code):
    info = {"error": type(err).__name__, "message": str(err), "exit_code": code}
    for attr in ("time", "residual"):
        if getattr(err, attr, None) is not None:
            info[attr] = getattr(err, attr)
    sys.stderr.write(json.dumps(_num(info), sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        cfg = resolve_config(args)
        out = Path(cfg.outdir)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "config.json", cfg.as_dict())
        report = COMMANDS[cfg.subcommand](cfg, out)
    except SGError as err:
        return _fail(err, exit_code(err))
    except OSError as err:
        return _fail(err, 1)
    print(json.dumps(_num(report), sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
