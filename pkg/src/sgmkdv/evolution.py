"""Time integration of the sine-/sinh-Gordon flows in v-form and u-form.

v-form: v_t = sin(u(v))/2 (or sinh), u(v) the normalized lift of v.
u-form: u_t = d^-1 sin(u) + mu(u) with the mean drift mu fixed by keeping
int sin(u) = 0; mu diverges as int cos(u) -> 0, i.e. on the ramification locus.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from .errors import NotOnMsinh, OnRamificationLocus, ResolutionLoss
from .hamiltonian import vectorfield_sg, vectorfield_sh
from .phase_space import (EPS_CLASSIFY, TOL_CONSTRAINT, Phase, classify, moment_K,
                          obstruction_K1, project_to_msin, psi_sg_plus, psi_sh)
from .spectral import WindingFunction

EQUATIONS = ("sine_gordon", "sinh_gordon")
FORMS = ("v_form", "u_form")
DIAGNOSTICS = ("H", "constraint", "mean_v", "tail", "mu", "cos_integral")
TOL_DRIFT = 1e-8


@dataclass(frozen=True)
class EvolveConfig:
    dt: float
    t_end: float
    equation: str = "sine_gordon"
    form: str = "v_form"
    record_stride: int = 1
    eps: float = EPS_CLASSIFY
    tail_threshold: float = 1e-8

    def __post_init__(self):
        if not (self.dt > 0 and self.t_end > 0 and self.dt <= self.t_end):
            raise ValueError("need 0 < dt <= t_end")
        if self.equation not in EQUATIONS:
            raise ValueError(f"equation must be one of {EQUATIONS}")
        if self.form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")

    @property
    def steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))


@dataclass
class Trajectory:
    equation: str
    form: str
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=lambda: {k: [] for k in DIAGNOSTICS})
    mu_trace: list = field(default_factory=list)

    def record(self, t, state, diag):
        self.times.append(float(t))
        self.states.append(state)
        for key in DIAGNOSTICS:
            self.diagnostics[key].append(float(diag.get(key, np.nan)))

    def series(self, key) -> np.ndarray:
        return np.asarray(self.diagnostics[key])

    def u_states(self) -> list[WindingFunction]:
        if self.form == "u_form":
            return list(self.states)
        to_u = psi_sg_plus if self.equation == "sine_gordon" else psi_sh
        return [to_u(v) for v in self.states]

    def __len__(self):
        return len(self.times)

    def until(self, t_max: float) -> "Trajectory":
        """The records with t <= t_max (the drift trace is dropped)."""
        keep = [i for i, t in enumerate(self.times) if t <= t_max + 1e-12]
        out = Trajectory(self.equation, self.form)
        for i in keep:
            out.record(self.times[i], self.states[i], {k: v[i] for k, v in self.diagnostics.items()})
        return out

    @property
    def max_abs_mu(self) -> float:
        """Largest |mu| seen at any step, recorded or not."""
        return max((abs(m) for _, m in self.mu_trace), default=float("nan"))


def rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


# -- diagnostics -------------------------------------------------------------

def _u_diagnostics(u: WindingFunction, equation: str) -> dict:
    vals = u.values
    if equation == "sine_gordon":
        s, c = np.sin(vals), np.cos(vals)
        H = 0.25 * sp.quadrature(c)
    else:
        s, c = np.sinh(vals), np.cosh(vals)
        H = -0.25 * sp.quadrature(c)
    C = sp.quadrature(c)
    K1 = sp.quadrature(c * sp.antiderivative(s - sp.quadrature(s), np.inf))
    return {
        "H": H,
        "constraint": sp.quadrature(s),
        "cos_integral": C,
        "mu": -K1 / C if C != 0 else np.inf,
    }


def mean_drift_mu(u: WindingFunction, eps: float = EPS_CLASSIFY,
                  tol: float = TOL_CONSTRAINT) -> float:
    """d/dt of the mean of u along the sine-Gordon flow: -K1(u) / int cos(u)."""
    C = sp.quadrature(u.cos())
    if abs(C) <= eps:
        raise OnRamificationLocus(f"|int cos(u)| = {abs(C):.3e} <= {eps:g}", cos_integral=C)
    return -obstruction_K1(u, tol) / C


# -- v-form ------------------------------------------------------------------

def evolve_v(v0: np.ndarray, cfg: EvolveConfig) -> Trajectory:
    v = np.asarray(v0, dtype=float).copy()
    sine = cfg.equation == "sine_gordon"
    if sine:
        field_ = lambda w: vectorfield_sg(w, cfg.eps)
        to_u = lambda w: psi_sg_plus(w, cfg.eps)
        target_mean = np.pi * sp.antiderivative_affine(v)[0]
    else:
        field_ = vectorfield_sh
        to_u = psi_sh
        sp.antiderivative(v)  # enforces mean zero
        target_mean = 0.0
    v += target_mean - sp.quadrature(v)

    traj = Trajectory(cfg.equation, "v_form")

    def diagnose(w):
        d = _u_diagnostics(to_u(w), cfg.equation)
        d["mean_v"] = sp.quadrature(w)
        d["tail"] = sp.spectral_tail(w)
        return d

    def guard(w, t):
        if sine:
            K = moment_K(sp.lift(w))
            if abs(K) <= cfg.eps:
                raise OnRamificationLocus(f"flow left W at t = {t:.6g}", time=t,
                                          trajectory=traj, moment=K)
        tail = sp.spectral_tail(w)
        if tail > cfg.tail_threshold:
            raise ResolutionLoss(f"spectral tail {tail:.3e} at t = {t:.6g}", time=t,
                                 trajectory=traj, tail=tail)

    guard(v, 0.0)
    traj.record(0.0, v.copy(), diagnose(v))
    N = cfg.steps
    dt = cfg.t_end / N
    for i in range(1, N + 1):
        t = i * dt
        try:
            v = rk4_step(field_, v, dt)
        except OnRamificationLocus as err:
            raise OnRamificationLocus(str(err), time=t, trajectory=traj, **err.info) from err
        v += target_mean - sp.quadrature(v)
        guard(v, t)
        if i % cfg.record_stride == 0 or i == N:
            traj.record(t, v.copy(), diagnose(v))
    return traj


# -- u-form ------------------------------------------------------------------

def _u_field(k, equation, eps, on_mu=None):
    x = None

    def f(p):
        nonlocal x
        if x is None:
            x = 2 * np.pi * k * sp.nodes(len(p))
        vals = x + p
        if equation == "sine_gordon":
            s, c = np.sin(vals), np.cos(vals)
        else:
            s, c = np.sinh(vals), np.cosh(vals)
        C = sp.quadrature(c)
        if abs(C) <= eps:
            raise OnRamificationLocus(f"|int cos(u)| = {abs(C):.3e} <= {eps:g}", cos_integral=C)
        F = sp.antiderivative(s - sp.quadrature(s), np.inf)
        mu = -sp.quadrature(c * F) / C
        if on_mu is not None:
            on_mu(mu)
        return F + mu

    return f


def evolve_u_direct(u0: WindingFunction, cfg: EvolveConfig) -> Trajectory:
    eq = cfg.equation
    traj = Trajectory(eq, "u_form")
    if eq == "sine_gordon":
        cls = classify(u0, cfg.eps)
    elif u0.k != 0:
        raise ValueError("sinh-Gordon states carry no winding")
    elif abs(sp.quadrature(np.sinh(u0.values))) > TOL_CONSTRAINT:
        raise NotOnMsinh("initial state violates int sinh(u) = 0")

    k = u0.k
    stage_mu = []
    f = _u_field(k, eq, cfg.eps, stage_mu.append)

    def diagnose(p):
        u = WindingFunction(k, p)
        d = _u_diagnostics(u, eq)
        d["mean_v"] = np.pi * k + 0.5 * sp.quadrature(sp.derivative(p))
        d["tail"] = sp.spectral_tail(p)
        return d

    p = u0.periodic.copy()
    d0 = diagnose(p)
    traj.record(0.0, WindingFunction(k, p), d0)
    traj.mu_trace.append((0.0, d0["mu"]))
    if eq == "sine_gordon" and cls.tag is Phase.SING:
        raise OnRamificationLocus("initial state lies on Sing", time=0.0,
                                  trajectory=traj, moment=cls.moment)
    C_prev = d0["cos_integral"]
    N = cfg.steps
    dt = cfg.t_end / N
    for i in range(1, N + 1):
        t = i * dt
        stage_mu.clear()
        try:
            p = rk4_step(f, p, dt)
        except OnRamificationLocus as err:
            traj.mu_trace.extend((t - dt, m) for m in stage_mu)
            raise OnRamificationLocus(f"flow reached the ramification locus near t = {t:.6g}",
                                      time=t, trajectory=traj, **err.info) from err
        # the drift actually used inside the step, then the value at the new state
        traj.mu_trace.extend((t - dt, m) for m in stage_mu)
        d = _u_diagnostics(WindingFunction(k, p), eq)
        traj.mu_trace.append((t, d["mu"]))
        C = d["cos_integral"]
        if abs(C) <= cfg.eps:
            raise OnRamificationLocus(f"flow reached the ramification locus at t = {t:.6g}",
                                      time=t, trajectory=traj, cos_integral=C)
        if eq == "sine_gordon" and np.sign(C) != np.sign(C_prev):
            # a step that jumps over the band still crossed Sing on the way
            raise OnRamificationLocus(f"int cos(u) changed sign near t = {t:.6g}", time=t,
                                      trajectory=traj, cos_integral=C, previous=C_prev)
        if eq == "sine_gordon" and abs(d["constraint"]) > TOL_DRIFT:
            # the exact field keeps int sin(u) fixed; RK4 only loses it when mu*dt is O(1)
            raise OnRamificationLocus(
                f"|int sin(u)| = {abs(d['constraint']):.3e} after a step with |mu| = {abs(d['mu']):.3e}",
                time=t, trajectory=traj, constraint=d["constraint"], mu=d["mu"],
                reason="unresolved mean drift")
        C_prev = C
        tail = sp.spectral_tail(p)
        if tail > cfg.tail_threshold:
            raise ResolutionLoss(f"spectral tail {tail:.3e} at t = {t:.6g}", time=t,
                                 trajectory=traj, tail=tail)
        if i % cfg.record_stride == 0 or i == N:
            traj.record(t, WindingFunction(k, p.copy()), diagnose(p))
    return traj


# -- probing the ramification locus ------------------------------------------

@dataclass
class SingProbeReport:
    K1: float
    tol: float
    profile: list

    @property
    def verdict(self) -> str:
        return "obstructed" if abs(self.K1) > self.tol else "not obstructed"

    def as_dict(self) -> dict:
        return {"K1": self.K1, "tol": self.tol, "verdict": self.verdict, "profile": self.profile}


def sing_probe(u0: WindingFunction, deltas=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
               eps: float = EPS_CLASSIFY, tol: float = TOL_CONSTRAINT) -> SingProbeReport:
    """K1 at a point of Sing and the growth of mu along nearby points of P+.

    The nearby points are u0 - delta*sin(u0) pushed back onto int sin = 0
    along cos(u0); their int cos(u) is of order delta.
    """
    if classify(u0, eps).tag is not Phase.SING:
        raise ValueError("sing_probe needs a point of Sing")
    K1 = obstruction_K1(u0, tol=max(tol, 1e-8))
    h = -u0.sin()
    profile = []
    for d in deltas:
        u = project_to_msin(WindingFunction(u0.k, u0.periodic + d * h), u0.cos())
        C = float(sp.quadrature(u.cos()))
        K1d = obstruction_K1(u, tol=1e-10)
        profile.append({"delta": float(d), "cos_integral": C, "K1": K1d,
                        "mu": -K1d / C if C else float("inf")})
    return SingProbeReport(K1, tol, profile)
