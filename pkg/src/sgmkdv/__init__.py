"""Numerical toolkit for sine- and sinh-Gordon flows on mKdV phase space."""
from . import evolution, floquet, geometry, hamiltonian, initial, phase_space, spectral
from .errors import *  # noqa: F401,F403
from .spectral import PeriodicGrid, WindingFunction

__version__ = "0.1.0"
