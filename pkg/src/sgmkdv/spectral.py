"""Trigonometric calculus on the uniform grid x_j = j/n of the unit circle.

Functions on the circle are plain numpy arrays of samples (real unless
stated otherwise); the grid is implied by the array length.  Functions with
a topological charge, u(x + 1) = u(x) + 2*pi*k, are ``WindingFunction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import NonIntegerMean, NonZeroMean

TOL_MEAN = 1e-8
TOL_INT = 1e-8


@dataclass(frozen=True)
class PeriodicGrid:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            raise ValueError(f"grid size must be an even integer >= 8, got {self.n}")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in FFT order; the Nyquist entry is -n/2."""
        return np.fft.fftfreq(self.n, 1.0 / self.n)

    @cached_property
    def _derivative_symbol(self) -> np.ndarray:
        sym = 2j * np.pi * self.wavenumbers
        sym[self.n // 2] = 0.0
        return sym

    @cached_property
    def _antiderivative_symbol(self) -> np.ndarray:
        k = self.wavenumbers
        sym = np.zeros(self.n, dtype=complex)
        keep = k != 0
        sym[keep] = 1.0 / (2j * np.pi * k[keep])
        sym[self.n // 2] = 0.0
        return sym


@lru_cache(maxsize=64)
def grid(n: int) -> PeriodicGrid:
    return PeriodicGrid(int(n))


def grid_of(f) -> PeriodicGrid:
    return grid(len(f))


def nodes(n: int) -> np.ndarray:
    return grid(n).nodes


def transform(f: np.ndarray) -> np.ndarray:
    """Fourier coefficients normalized so that c[0] is the mean of f."""
    f = np.asarray(f)
    grid_of(f)
    return np.fft.fft(f) / len(f)


def inverse_transform(c: np.ndarray, real: bool = True) -> np.ndarray:
    f = np.fft.ifft(np.asarray(c) * len(c))
    return f.real if real else f


def _apply_symbol(f, symbol):
    out = np.fft.ifft(np.fft.fft(f) * symbol)
    return out if np.iscomplexobj(f) else out.real


def derivative(f: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative; the Nyquist mode is dropped for every order."""
    g = grid_of(f)
    return _apply_symbol(np.asarray(f), g._derivative_symbol ** order)


def quadrature(f: np.ndarray):
    """Integral over one period (the grid mean)."""
    return np.mean(f)


def antiderivative(v: np.ndarray, tol_mean: float = TOL_MEAN) -> np.ndarray:
    """Mean-zero antiderivative of a mean-zero function."""
    v = np.asarray(v)
    m = quadrature(v)
    if abs(m) > tol_mean:
        raise NonZeroMean(f"mean {m!r} exceeds tolerance {tol_mean:g}")
    return _apply_symbol(v, grid_of(v)._antiderivative_symbol)


def antiderivative_affine(v: np.ndarray, tol_int: float = TOL_INT):
    """Split an antiderivative of v (mean k*pi) into k and a periodic part.

    Returns ``(k, p)`` with the antiderivative equal to k*pi*x + p(x) and
    p the mean-zero antiderivative of v - k*pi.
    """
    v = np.asarray(v, dtype=float)
    ratio = quadrature(v) / np.pi
    k = int(np.rint(ratio))
    if abs(ratio - k) > tol_int:
        raise NonIntegerMean(f"mean/pi = {ratio!r} is not within {tol_int:g} of an integer")
    return k, antiderivative(v - k * np.pi, tol_mean=np.inf)


def lift(v: np.ndarray, tol_int: float = TOL_INT) -> "WindingFunction":
    """The function 2 * (antiderivative of v), which has winding number mean(v)/pi."""
    k, p = antiderivative_affine(v, tol_int)
    return WindingFunction(k, 2.0 * p)


def reflect(f: np.ndarray) -> np.ndarray:
    """f(-x) on the grid, by index reversal x_j -> x_{-j mod n}."""
    f = np.asarray(f)
    return np.roll(f[::-1], 1)


def _padded_coefficients(f, m):
    n = len(f)
    c = np.fft.fft(f) / n
    out = np.zeros(m, dtype=complex)
    h = n // 2
    out[:h] = c[:h]
    out[m - h + 1:] = c[h + 1:]
    # split the Nyquist mode symmetrically so real input stays real
    out[h] += 0.5 * c[h]
    out[m - h] += 0.5 * c[h]
    return out


def resample(f: np.ndarray, m: int, offset: float = 0.0) -> np.ndarray:
    """Evaluate the trigonometric interpolant of f at (j + offset)/m, j < m.

    Requires m >= len(f).
    """
    f = np.asarray(f)
    n = len(f)
    if m < n:
        raise ValueError("resample only refines the grid")
    c = _padded_coefficients(f, m)
    if offset:
        c = c * np.exp(2j * np.pi * np.fft.fftfreq(m, 1.0 / m) * offset / m)
    out = np.fft.ifft(c) * m
    return out if np.iscomplexobj(f) else out.real


def interpolate(f: np.ndarray, x) -> np.ndarray:
    """Evaluate the band-limited interpolant of f at arbitrary points x."""
    f = np.asarray(f)
    n = len(f)
    c = np.fft.fft(f) / n
    k = grid(n).wavenumbers.copy()
    x = np.asarray(x, dtype=float)
    phase = np.exp(2j * np.pi * np.multiply.outer(x, k[: n // 2]))
    val = phase @ c[: n // 2]
    neg = np.exp(2j * np.pi * np.multiply.outer(x, k[n // 2 + 1:]))
    val = val + neg @ c[n // 2 + 1:]
    val = val + c[n // 2] * np.cos(np.pi * n * x)
    return val if np.iscomplexobj(f) else val.real


def spectral_tail(f: np.ndarray) -> float:
    """Fraction of the non-mean energy carried by wavenumbers |k| >= n/3."""
    c = transform(f)
    k = np.abs(grid_of(f).wavenumbers)
    e = np.abs(c) ** 2
    e[0] = 0.0
    total = e.sum()
    if total == 0.0:
        return 0.0
    return float(e[k >= len(f) / 3].sum() / total)


def random_trig_poly(rng: np.random.Generator, n: int, kmax: int = 4,
                     amplitude: float = 1.0, mean: float = 0.0) -> np.ndarray:
    """Random real trigonometric polynomial with modes 1..kmax and sup-norm <= amplitude."""
    x = nodes(n)
    f = np.zeros(n)
    for m in range(1, kmax + 1):
        a, b = rng.normal(size=2) / m
        f += a * np.cos(2 * np.pi * m * x) + b * np.sin(2 * np.pi * m * x)
    peak = np.max(np.abs(f))
    if peak > 0:
        f *= amplitude * rng.uniform(0.2, 1.0) / peak
    return f + mean


@dataclass(frozen=True, eq=False)
class WindingFunction:
    """u(x) = 2*pi*k*x + periodic(x), so that u(x + 1) = u(x) + 2*pi*k."""

    k: int
    periodic: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k", int(self.k))
        p = np.asarray(self.periodic, dtype=float)
        grid_of(p)
        if not np.all(np.isfinite(p)):
            raise ValueError("non-finite samples")
        object.__setattr__(self, "periodic", p)

    @classmethod
    def from_values(cls, values, k: int = 0) -> "WindingFunction":
        values = np.asarray(values, dtype=float)
        return cls(k, values - 2 * np.pi * k * nodes(len(values)))

    @property
    def n(self) -> int:
        return len(self.periodic)

    @property
    def values(self) -> np.ndarray:
        return 2 * np.pi * self.k * nodes(self.n) + self.periodic

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return 2 * np.pi * self.k * x + interpolate(self.periodic, x)

    def derivative(self) -> np.ndarray:
        return 2 * np.pi * self.k + derivative(self.periodic)

    def second_derivative(self) -> np.ndarray:
        return derivative(self.periodic, 2)

    def shift(self, c: float) -> "WindingFunction":
        return WindingFunction(self.k, self.periodic + c)

    def reflect(self) -> "WindingFunction":
        return WindingFunction(-self.k, reflect(self.periodic))

    def mean(self) -> float:
        """The average of u over [0, 1]."""
        return float(np.pi * self.k + quadrature(self.periodic))

    def sin(self) -> np.ndarray:
        return np.sin(self.values)

    def cos(self) -> np.ndarray:
        return np.cos(self.values)

    def distance(self, other: "WindingFunction") -> float:
        """Sup-norm distance on the grid; infinite for different charges."""
        if self.k != other.k:
            return np.inf
        return float(np.max(np.abs(self.periodic - other.periodic)))

    def angle_distance(self, other: "WindingFunction") -> float:
        """Sup-norm distance of u and other as angles, i.e. modulo 2*pi."""
        if self.k != other.k:
            return np.inf
        d = np.mod(self.periodic - other.periodic + np.pi, 2 * np.pi) - np.pi
        return float(np.max(np.abs(d)))
