"""Fold structure of the sine-Gordon phase space and the sinh-Gordon analogue.

The constraint set {int sin(u) = 0} splits into the branches P+ / P- (sign of
int cos(u)) and the ramification locus Sing where the complex moment
K(u) = int exp(iu) dx vanishes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .errors import NotOnMsin, NotOnMsinh, OnRamificationLocus, WrongBranch
from .spectral import WindingFunction

EPS_CLASSIFY = 1e-6
TOL_CONSTRAINT = 1e-8


class Phase(enum.Enum):
    PPLUS = "PPlus"
    PMINUS = "PMinus"
    SING = "Sing"


@dataclass(frozen=True)
class PhaseClass:
    tag: Phase
    moment: complex
    eps: float

    @property
    def margin(self) -> float:
        """Signed distance of |K| from the classification threshold."""
        return abs(self.moment) - self.eps

    @property
    def constraint_residual(self) -> float:
        return abs(self.moment.imag)


@dataclass(frozen=True)
class SingFamilyParams:
    k: int
    r: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be a positive integer")
        if not 0.0 < self.r < 1.0:
            raise ValueError("r must lie in (0, 1)")


def moment_K(u: WindingFunction) -> complex:
    return complex(sp.quadrature(np.exp(1j * u.values)))


def classify(u: WindingFunction, eps: float = EPS_CLASSIFY) -> PhaseClass:
    if eps <= 0:
        raise ValueError("eps must be positive")
    K = moment_K(u)
    if abs(K.imag) > eps:
        raise NotOnMsin(f"|int sin(u)| = {abs(K.imag):.3e} > {eps:g}")
    if abs(K) <= eps:
        tag = Phase.SING
    else:
        tag = Phase.PPLUS if K.real > 0 else Phase.PMINUS
    return PhaseClass(tag, K, eps)


# -- sinh-Gordon -----------------------------------------------------------

def c_sh(v: np.ndarray, tol_mean: float = sp.TOL_MEAN) -> float:
    w = 2.0 * sp.antiderivative(v, tol_mean)
    return float(-np.arctanh(sp.quadrature(np.sinh(w)) / sp.quadrature(np.cosh(w))))


def psi_sh(v: np.ndarray, tol_mean: float = sp.TOL_MEAN) -> WindingFunction:
    w = 2.0 * sp.antiderivative(v, tol_mean)
    c = -np.arctanh(sp.quadrature(np.sinh(w)) / sp.quadrature(np.cosh(w)))
    return WindingFunction(0, w + c)


def psi_sh_inv(u: WindingFunction, tol: float = TOL_CONSTRAINT) -> np.ndarray:
    if u.k != 0:
        raise NotOnMsinh("sinh-Gordon states carry no winding")
    s = sp.quadrature(np.sinh(u.values))
    if abs(s) > tol:
        raise NotOnMsinh(f"|int sinh(u)| = {abs(s):.3e} > {tol:g}")
    return 0.5 * u.derivative()


# -- sine-Gordon -----------------------------------------------------------

def _lift_moment(v, eps):
    w = sp.lift(v)
    K = moment_K(w)
    if abs(K) <= eps:
        raise OnRamificationLocus(f"|int exp(2i d^-1 v)| = {abs(K):.3e} <= {eps:g}", moment=K)
    return w, K


def c_sg(v: np.ndarray, eps: float = EPS_CLASSIFY) -> float:
    """Phase in [0, 2*pi) rotating the moment of 2 d^-1 v onto the positive axis."""
    _, K = _lift_moment(v, eps)
    return float(np.mod(-np.angle(K), 2 * np.pi))


def psi_sg_plus(v: np.ndarray, eps: float = EPS_CLASSIFY) -> WindingFunction:
    w, K = _lift_moment(v, eps)
    return w.shift(np.mod(-np.angle(K), 2 * np.pi))


def psi_sg_minus(v: np.ndarray, eps: float = EPS_CLASSIFY) -> WindingFunction:
    w, K = _lift_moment(v, eps)
    return w.reflect().shift(np.mod(-np.angle(K), 2 * np.pi) + np.pi)


def _require_branch(u, want, eps):
    cls = classify(u, eps)
    if cls.tag is Phase.SING:
        raise OnRamificationLocus("u lies on Sing", moment=cls.moment)
    if cls.tag is not want:
        raise WrongBranch(f"expected {want.value}, got {cls.tag.value}")


def psi_sg_plus_inv(u: WindingFunction, eps: float = EPS_CLASSIFY) -> np.ndarray:
    _require_branch(u, Phase.PPLUS, eps)
    return 0.5 * u.derivative()


def psi_sg_minus_inv(u: WindingFunction, eps: float = EPS_CLASSIFY) -> np.ndarray:
    _require_branch(u, Phase.PMINUS, eps)
    return -0.5 * sp.reflect(u.derivative())


def involution_T(u: WindingFunction) -> WindingFunction:
    """u -> u(-x) + pi; swaps P+ and P-, preserves Sing.

    Applied twice it adds 2*pi, so it is an involution on angles (compare
    with WindingFunction.angle_distance) and on v = u_x / 2.
    """
    return u.reflect().shift(np.pi)


# -- the ramification locus ------------------------------------------------

def obstruction_K1(u: WindingFunction, tol: float = TOL_CONSTRAINT) -> float:
    """int cos(u) * (mean-zero antiderivative of sin(u)) dx."""
    s = u.sin()
    if abs(sp.quadrature(s)) > tol:
        raise NotOnMsin(f"|int sin(u)| = {abs(sp.quadrature(s)):.3e} > {tol:g}")
    return float(sp.quadrature(u.cos() * sp.antiderivative(s, tol_mean=np.inf)))


def sing_family_w(p: SingFamilyParams, n: int) -> WindingFunction:
    """Piecewise-linear member of Sing: rises 0 -> 2k*pi on [0, r], falls by 2*pi on [r, 1].

    Sampled directly on the grid (no smoothing); its charge is k - 1.
    """
    x = sp.nodes(n)
    k, r = p.k, p.r
    w = np.where(x < r, 2 * k * np.pi * x / r, 2 * k * np.pi - 2 * np.pi * (x - r) / (1 - r))
    return WindingFunction.from_values(w, k - 1)


def k1_closed_form(k: int, r: float) -> float:
    """Exact K1 of the piecewise-linear family (grid limit)."""
    return (k * (1 - r) ** 2 - r * r) / (4 * k * np.pi)


def k1_root(k: int) -> float:
    """The unique r in (0, 1) with K1(w_k(r)) = 0."""
    s = np.sqrt(k)
    return float(s / (1 + s))


def locate_k1_root(k: int, n: int = 2 ** 14) -> float:
    """Root of r -> K1(w_k(r)) found numerically from sampled family members.

    Only grid-aligned r = j/n give members exactly on Sing, so the search
    bisects over j and finishes with a secant step between neighbours.
    """
    f = lambda j: obstruction_K1(sing_family_w(SingFamilyParams(k, j / n), n), tol=1e-8)
    lo, hi = 1, n - 1
    flo, fhi = f(lo), f(hi)
    if np.sign(flo) == np.sign(fhi):
        raise ValueError("no sign change of K1 over (0, 1)")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        fm = f(mid)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return float((lo - flo * (hi - lo) / (fhi - flo)) / n)


def oscillation(u: WindingFunction) -> float:
    """max - min of u over [0, 1] (grid nodes plus the endpoint x = 1)."""
    vals = np.append(u.values, u.periodic[0] + 2 * np.pi * u.k)
    return float(vals.max() - vals.min())


# -- projections used to generate test data --------------------------------

def rotate_to_branch(u: WindingFunction, branch: Phase = Phase.PPLUS,
                     eps: float = EPS_CLASSIFY) -> WindingFunction:
    """Add the constant that makes K(u) real with the sign of the branch."""
    K = moment_K(u)
    if abs(K) <= eps:
        raise OnRamificationLocus("moment vanishes; no branch to rotate onto", moment=K)
    c = -np.angle(K) + (np.pi if branch is Phase.PMINUS else 0.0)
    return u.shift(c)


def project_to_msin(u: WindingFunction, direction: np.ndarray | None = None,
                    tol: float = 1e-14, maxiter: int = 50) -> WindingFunction:
    """Newton solve of int sin(u + a*h) = 0 along h (default cos(u))."""
    h = u.cos() if direction is None else np.asarray(direction, dtype=float)
    a = 0.0
    for _ in range(maxiter):
        vals = u.values + a * h
        f = sp.quadrature(np.sin(vals))
        if abs(f) <= tol:
            break
        df = sp.quadrature(np.cos(vals) * h)
        if df == 0:
            raise NotOnMsin("projection direction is degenerate")
        a -= f / df
    else:
        raise NotOnMsin("projection onto the constraint did not converge")
    return WindingFunction(u.k, u.periodic + a * h)


def project_to_sing(u: WindingFunction, tol: float = 1e-13, maxiter: int = 60) -> WindingFunction:
    """Newton solve of K(u + a*cos(2 pi x) + b*sin(2 pi x)) = 0."""
    x = sp.nodes(u.n)
    h = np.stack([np.cos(2 * np.pi * x), np.sin(2 * np.pi * x)])
    ab = np.zeros(2)
    for _ in range(maxiter):
        vals = u.values + ab @ h
        K = sp.quadrature(np.exp(1j * vals))
        if abs(K) <= tol:
            return WindingFunction(u.k, u.periodic + ab @ h)
        dK = np.mean(1j * np.exp(1j * vals) * h, axis=1)
        J = np.array([dK.real, dK.imag])
        try:
            ab -= np.linalg.solve(J, [K.real, K.imag])
        except np.linalg.LinAlgError:
            break
    raise ValueError("projection onto Sing did not converge")
