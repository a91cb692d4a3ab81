"""Floquet discriminants of the Hill operator -y'' + q y and the sine/mKdV chain.

The monodromy of y'' = (q - lam) y over one period is integrated with a
fixed-step fourth-order Magnus scheme (two Gauss nodes per step).  Every step
is the exponential of a trace-free matrix, so det(monodromy) = 1 up to
roundoff.  q is evaluated off-grid through its trigonometric interpolant.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from .errors import OdeStepFailure
from .spectral import WindingFunction

SUBSTEPS = 16
ERROR_BUDGET = 1e-8

_GAUSS = (0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6)


@dataclass
class DiscriminantCurve:
    lambdas: np.ndarray
    values: np.ndarray
    potential_id: dict = field(default_factory=dict)


def _coshc(z2):
    """(cosh(s), sinh(s)/s) for s**2 = z2, elementwise and stable near 0."""
    s = np.sqrt(z2.astype(complex))
    small = np.abs(z2) < 1e-8
    safe = np.where(small, 1.0, s)
    ch = np.where(small, 1 + z2 / 2, np.cosh(safe))
    sh = np.where(small, 1 + z2 / 6, np.sinh(safe) / safe)
    return ch, sh


def _step_matrices(q, lam, substeps):
    n = len(q)
    m = n * substeps
    h = 1.0 / m
    # q at the two Gauss nodes of every step: shifted uniform fine grids
    q1 = sp.resample(q, m, _GAUSS[0])
    q2 = sp.resample(q, m, _GAUSS[1])
    lam = np.atleast_1d(np.asarray(lam))[:, None]
    a1 = q1[None, :] - lam
    a2 = q2[None, :] - lam
    alpha = np.sqrt(3) / 12 * h * h * (a1 - a2)
    gamma = 0.5 * h * (a1 + a2)
    beta = h
    ch, sh = _coshc(alpha * alpha + beta * gamma)
    E = np.empty(a1.shape + (2, 2), dtype=complex)
    E[..., 0, 0] = ch + sh * alpha
    E[..., 0, 1] = sh * beta
    E[..., 1, 0] = sh * gamma
    E[..., 1, 1] = ch - sh * alpha
    return E


def _ordered_product(E):
    """E[..., -1] @ ... @ E[..., 0] by pairwise reduction along axis -3."""
    while E.shape[-3] > 1:
        if E.shape[-3] % 2:
            eye = np.broadcast_to(np.eye(2, dtype=E.dtype), E.shape[:-3] + (1, 2, 2))
            E = np.concatenate([E, eye], axis=-3)
        E = E[..., 1::2, :, :] @ E[..., 0::2, :, :]
    return E[..., 0, :, :]


def monodromy(q: np.ndarray, lam, substeps: int = SUBSTEPS) -> np.ndarray:
    """Fundamental matrix [[y1, y2], [y1', y2']] at x = 1, shape (len(lam), 2, 2)."""
    q = np.asarray(q)
    return _ordered_product(_step_matrices(q, lam, substeps))


def _finalize(values, q, lam):
    if np.isrealobj(q) and np.isrealobj(np.asarray(lam)):
        values = values.real
    return values


def hill_discriminant(q: np.ndarray, lam, substeps: int = SUBSTEPS,
                      error_budget: float | None = ERROR_BUDGET):
    """Trace of the monodromy of -y'' + q y = lam y.

    With an error budget the result is compared against a run with twice
    the steps and OdeStepFailure is raised if they disagree by more than
    ``error_budget * max(1, |Delta|)``.
    """
    scalar = np.ndim(lam) == 0
    with np.errstate(over="ignore", invalid="ignore"):
        M = monodromy(q, lam, substeps)
    delta = M[:, 0, 0] + M[:, 1, 1]
    if not np.all(np.isfinite(delta)):
        raise OdeStepFailure("monodromy overflowed")
    if error_budget is not None:
        with np.errstate(over="ignore", invalid="ignore"):
            fine = monodromy(q, lam, 2 * substeps)
        d2 = fine[:, 0, 0] + fine[:, 1, 1]
        err = np.abs(d2 - delta) / np.maximum(1.0, np.abs(d2))
        if np.max(err) > error_budget:
            raise OdeStepFailure(f"step-doubling discrepancy {np.max(err):.3e} exceeds {error_budget:g}")
    delta = _finalize(delta, q, lam)
    return delta[0] if scalar else delta


def wronskian(q: np.ndarray, lam, substeps: int = SUBSTEPS):
    d = np.linalg.det(monodromy(q, lam, substeps))
    d = _finalize(d, q, lam)
    return d[0] if np.ndim(lam) == 0 else d


def discriminant_curve(q, lambdas, potential_id=None, **kw) -> DiscriminantCurve:
    lambdas = np.asarray(lambdas)
    return DiscriminantCurve(lambdas, np.atleast_1d(hill_discriminant(q, lambdas, **kw)),
                             dict(potential_id or {}))


# -- the chain sine-Gordon -> mKdV -> KdV ------------------------------------

def miura(v: np.ndarray) -> np.ndarray:
    """V -> V_x + V**2 (works for complex V)."""
    v = np.asarray(v)
    return sp.derivative(v) + v * v


def sg_to_kdv(u: WindingFunction) -> np.ndarray:
    """u_xx + u_x**2, a periodic Hill potential."""
    ux = u.derivative()
    return u.second_derivative() + ux * ux


def delta_SG(u: WindingFunction, lam, **kw):
    return hill_discriminant(sg_to_kdv(u), np.asarray(lam) ** 2, **kw)


def delta_M(v: np.ndarray, lam, **kw):
    return np.exp(-sp.quadrature(v)) * hill_discriminant(miura(v), lam, **kw)


def lax_potential(u: WindingFunction, equation: str = "sine_gordon") -> np.ndarray:
    """The Hill potential whose spectrum the real flow actually preserves.

    miura(s * u_x / 2) with s = i for sine-Gordon and s = 1 for sinh-Gordon;
    the sine case is complex-valued.
    """
    scale = 0.5j if equation == "sine_gordon" else 0.5
    return miura(scale * u.derivative())


CHAINS = ("chodos", "lax")


def chain_potential(u: WindingFunction, chain: str = "chodos", equation: str = "sine_gordon"):
    if chain == "chodos":
        return sg_to_kdv(u)
    if chain == "lax":
        return lax_potential(u, equation)
    raise ValueError(f"chain must be one of {CHAINS}")


def discriminant_table(traj, lambdas, chain: str = "chodos", **kw) -> np.ndarray:
    """Delta(q(u(t)), lam) for every recorded state, shape (len(traj), len(lambdas))."""
    lambdas = np.asarray(lambdas, dtype=float)
    rows = [np.atleast_1d(hill_discriminant(chain_potential(u, chain, traj.equation), lambdas, **kw))
            for u in traj.u_states()]
    return np.array(rows)


def isospectrality_drift(traj, lambdas, chain: str = "chodos", **kw) -> float:
    """max over t and lam of |Delta(q(u(t)), lam) - Delta(q(u(0)), lam)|."""
    table = discriminant_table(traj, lambdas, chain, **kw)
    return float(np.max(np.abs(table - table[0])))
