"""Hamiltonians on mKdV phase space, their L2-gradients and the Gardner bracket."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import spectral as sp
from .phase_space import EPS_CLASSIFY, psi_sg_plus, psi_sh


@dataclass(frozen=True)
class Functional:
    name: str
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]

    def __call__(self, v):
        return self.value(v)


def H_sh(v: np.ndarray) -> float:
    u = psi_sh(v)
    return float(-0.25 * sp.quadrature(np.cosh(u.values)))


def H_sg(v: np.ndarray, eps: float = EPS_CLASSIFY) -> float:
    u = psi_sg_plus(v, eps)
    return float(0.25 * sp.quadrature(u.cos()))


def vectorfield_sh(v: np.ndarray) -> np.ndarray:
    return 0.5 * np.sinh(psi_sh(v).values)


def vectorfield_sg(v: np.ndarray, eps: float = EPS_CLASSIFY) -> np.ndarray:
    return 0.5 * psi_sg_plus(v, eps).sin()


def grad_H_sh(v: np.ndarray) -> np.ndarray:
    # int sinh(u) vanishes up to roundoff by the choice of c_sh
    return sp.antiderivative(vectorfield_sh(v), tol_mean=np.inf)


def grad_H_sg(v: np.ndarray, eps: float = EPS_CLASSIFY) -> np.ndarray:
    return sp.antiderivative(vectorfield_sg(v, eps), tol_mean=np.inf)


def gardner_bracket(F: Functional, G: Functional, v: np.ndarray) -> float:
    """{F, G}(v) = int dF * d/dx dG dx."""
    return float(sp.quadrature(F.gradient(v) * sp.derivative(G.gradient(v))))


HAMILTONIAN_SH = Functional("H_sh", H_sh, grad_H_sh)
HAMILTONIAN_SG = Functional("H_sg", H_sg, grad_H_sg)
MEAN = Functional("mean", lambda v: float(sp.quadrature(v)), lambda v: np.ones(len(v)))
MASS = Functional("half_l2", lambda v: float(0.5 * sp.quadrature(v * v)), lambda v: np.asarray(v, float))
CUBIC = Functional("third_cubic", lambda v: float(sp.quadrature(v ** 3) / 3.0), lambda v: np.asarray(v, float) ** 2)


def check_gradient(F: Functional, v: np.ndarray, h: np.ndarray, step: float = 1e-5):
    """Central-difference directional derivative against <grad F(v), h>.

    Returns ``(fd, analytic, relative_error)``.
    """
    fd = (F(v + step * h) - F(v - step * h)) / (2 * step)
    analytic = float(sp.quadrature(F.gradient(v) * h))
    scale = max(abs(analytic), abs(fd), np.finfo(float).tiny)
    return fd, analytic, abs(fd - analytic) / scale
