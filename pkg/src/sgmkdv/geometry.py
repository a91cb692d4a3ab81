"""Pseudospherical surfaces in Chebyshev coordinates from solutions of u_xt = sin(u).

With g = dx^2 + 2 cos(u) dx dt + dt^2 and A = 2 sin(u) dx dt the frame
(r, e1 = r_x, e2 = r_t, N) satisfies

    along x:  e1' = u_x (cot u e1 - csc u e2),  e2' = sin u N,  N' = cot u e1 - csc u e2
    along t:  e1' = sin u N,  e2' = u_t (cot u e2 - csc u e1),  N' = cot u e2 - csc u e1

The surface is built by integrating along the first t-row in x and then
along t for every x; the two routes agree only if u solves the equation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import spectral as sp
from .errors import CompatibilityFailure, DegenerateMetric, IoFailure

DELTA_RANGE = 0.05
RESIDUAL_THRESHOLD = 1e-2


@dataclass
class SolutionPatch:
    """u[i, j] = u(x[i], t[j]) on a uniform rectangular grid."""

    x: np.ndarray
    t: np.ndarray
    u: np.ndarray
    periodic_x: bool = False
    provenance: str = ""

    def __post_init__(self):
        self.x = np.asarray(self.x, float)
        self.t = np.asarray(self.t, float)
        self.u = np.asarray(self.u, float)
        if self.u.shape != (self.x.size, self.t.size):
            raise ValueError("u must have shape (len(x), len(t))")
        if self.x.size < 5 or self.t.size < 5:
            raise ValueError("patch needs at least 5 points per direction")

    @property
    def hx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def ht(self) -> float:
        return float(self.t[1] - self.t[0])


@dataclass
class FrameState:
    r: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    N: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([self.r, self.e1, self.e2, self.N]).astype(float)

    @classmethod
    def from_array(cls, a) -> "FrameState":
        return cls(*(np.array(row) for row in a))

    @classmethod
    def initial(cls, u00: float) -> "FrameState":
        e1 = np.array([1.0, 0.0, 0.0])
        e2 = np.array([np.cos(u00), np.sin(u00), 0.0])
        N = np.cross(e1, e2)
        return cls(np.zeros(3), e1, e2, N / np.linalg.norm(N))


@dataclass
class SurfaceMesh:
    vertices: np.ndarray   # (n, m, 3)
    normals: np.ndarray    # (n, m, 3)

    @property
    def shape(self):
        return self.vertices.shape[:2]

    @property
    def faces(self) -> np.ndarray:
        """Triangles as 0-based indices into the row-major vertex list."""
        n, m = self.shape
        i, j = np.meshgrid(np.arange(n - 1), np.arange(m - 1), indexing="ij")
        a = (i * m + j).ravel()
        b, c, d = a + m, a + m + 1, a + 1
        tris = np.empty((a.size, 2, 3), dtype=int)
        tris[:, 0] = np.stack([a, b, c], 1)
        tris[:, 1] = np.stack([a, c, d], 1)
        return tris.reshape(-1, 3)


@dataclass
class FundamentalForms:
    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    A12: np.ndarray

    @property
    def det_g(self):
        return self.g11 * self.g22 - self.g12 ** 2


@dataclass
class Reconstruction:
    mesh: SurfaceMesh
    frames: np.ndarray          # (n, m, 4, 3): r, e1, e2, N
    residual: float
    angle_error: float
    unit_error: float
    diagnostics: dict = field(default_factory=dict)


def fundamental_forms(patch: SolutionPatch, delta_range: float = DELTA_RANGE) -> FundamentalForms:
    s = np.sin(patch.u)
    if np.min(s * s) <= delta_range ** 2:
        raise DegenerateMetric(f"min sin^2(u) = {np.min(s * s):.3e} <= {delta_range ** 2:g}")
    one = np.ones_like(patch.u)
    return FundamentalForms(one, np.cos(patch.u), one.copy(), s)


# -- finite differences --------------------------------------------------------

def fd4(f: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    """Fourth-order first derivative with one-sided stencils at the ends."""
    f = np.moveaxis(np.asarray(f, float), axis, 0)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / 12
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / 12
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / 12
    d[-1] = -(-25 * f[-1] + 48 * f[-2] - 36 * f[-3] + 16 * f[-4] - 3 * f[-5]) / 12
    d[-2] = -(-3 * f[-1] - 10 * f[-2] + 18 * f[-3] - 6 * f[-4] + f[-5]) / 12
    return np.moveaxis(d / h, 0, axis)


def midpoints4(f: np.ndarray, axis: int = 0) -> np.ndarray:
    """Fourth-order values halfway between consecutive samples."""
    f = np.moveaxis(np.asarray(f, float), axis, 0)
    mid = np.empty((f.shape[0] - 1,) + f.shape[1:])
    mid[1:-1] = (-f[:-3] + 9 * f[1:-2] + 9 * f[2:-1] - f[3:]) / 16
    mid[0] = (5 * f[0] + 15 * f[1] - 5 * f[2] + f[3]) / 16
    mid[-1] = (f[-4] - 5 * f[-3] + 15 * f[-2] + 5 * f[-1]) / 16
    return np.moveaxis(mid, 0, axis)


def _derivatives(patch):
    if patch.periodic_x:
        ux = np.apply_along_axis(sp.derivative, 0, patch.u) / (patch.hx * patch.x.size)
    else:
        ux = fd4(patch.u, patch.hx, 0)
    return ux, fd4(patch.u, patch.ht, 1)


# -- frame integration -----------------------------------------------------------

def _frame_rhs(Y, u, du, direction):
    s, c = np.sin(u)[..., None], np.cos(u)[..., None]
    du = du[..., None]
    e1, e2, N = Y[..., 1, :], Y[..., 2, :], Y[..., 3, :]
    if direction == "x":
        parts = (e1, du * (c * e1 - e2) / s, s * N, (c * e1 - e2) / s)
    else:
        parts = (e2, s * N, du * (c * e2 - e1) / s, (c * e2 - e1) / s)
    return np.stack(parts, axis=-2)


def _renormalize(Y):
    e1 = Y[..., 1, :] / np.linalg.norm(Y[..., 1, :], axis=-1, keepdims=True)
    e2 = Y[..., 2, :] / np.linalg.norm(Y[..., 2, :], axis=-1, keepdims=True)
    N = np.cross(e1, e2)
    N /= np.linalg.norm(N, axis=-1, keepdims=True)
    return np.stack([Y[..., 0, :], e1, e2, N], axis=-2)


def _gw_step(Y, u3, du3, direction, h):
    (u0, um, u1), (d0, dm, d1) = u3, du3
    k1 = _frame_rhs(Y, u0, d0, direction)
    k2 = _frame_rhs(Y + 0.5 * h * k1, um, dm, direction)
    k3 = _frame_rhs(Y + 0.5 * h * k2, um, dm, direction)
    k4 = _frame_rhs(Y + h * k3, u1, d1, direction)
    return _renormalize(Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4))


def gauss_weingarten_step(frame: FrameState, u, du, direction: str, h: float,
                          delta_range: float = DELTA_RANGE) -> FrameState:
    """One RK4 step of the frame equations.

    ``u`` and ``du`` hold (start, midpoint, end) samples of u and of its
    derivative along ``direction`` ('x' or 't').
    """
    if direction not in ("x", "t"):
        raise ValueError("direction must be 'x' or 't'")
    if np.min(np.abs(np.sin(u))) <= delta_range:
        raise DegenerateMetric("sin(u) too close to 0 along the step")
    u = tuple(np.asarray(a, float) for a in u)
    du = tuple(np.asarray(a, float) for a in du)
    return FrameState.from_array(_gw_step(frame.as_array(), u, du, direction, h))


def reconstruct_surface(patch: SolutionPatch, frame: FrameState | None = None,
                        delta_range: float = DELTA_RANGE,
                        residual_threshold: float | None = RESIDUAL_THRESHOLD) -> Reconstruction:
    fundamental_forms(patch, delta_range)
    u = patch.u
    ux, ut = _derivatives(patch)
    n, m = u.shape
    frames = np.empty((n, m, 4, 3))
    frames[0, 0] = (frame or FrameState.initial(u[0, 0])).as_array()

    umx, uxm = midpoints4(u[:, 0]), midpoints4(ux[:, 0])
    for i in range(n - 1):
        frames[i + 1, 0] = _gw_step(frames[i, 0], (u[i, 0], umx[i], u[i + 1, 0]),
                                    (ux[i, 0], uxm[i], ux[i + 1, 0]), "x", patch.hx)
    umt, utm = midpoints4(u, 1), midpoints4(ut, 1)
    for j in range(m - 1):
        frames[:, j + 1] = _gw_step(frames[:, j], (u[:, j], umt[:, j], u[:, j + 1]),
                                    (ut[:, j], utm[:, j], ut[:, j + 1]), "t", patch.ht)

    r = frames[..., 0, :]
    e1, e2 = frames[..., 1, :], frames[..., 2, :]
    # cross-differencing: x-derivative of the t-integrated surface against e1
    drx = (r[2:] - r[:-2]) / (2 * patch.hx)
    residual = float(np.max(np.linalg.norm(drx - e1[1:-1], axis=-1)))
    cosang = np.clip(np.sum(e1 * e2, axis=-1), -1.0, 1.0)
    angle_error = float(np.max(np.abs(np.arccos(cosang) - np.mod(u, 2 * np.pi))))
    unit_error = float(max(np.max(np.abs(np.linalg.norm(e1, axis=-1) - 1)),
                           np.max(np.abs(np.linalg.norm(e2, axis=-1) - 1))))
    if residual_threshold is not None and residual > residual_threshold:
        raise CompatibilityFailure(
            f"compatibility residual {residual:.3e} exceeds {residual_threshold:g}", residual)
    mesh = SurfaceMesh(r.copy(), frames[..., 3, :].copy())
    return Reconstruction(mesh, frames, residual, angle_error, unit_error)


# -- mesh diagnostics ------------------------------------------------------------

def discrete_gaussian_curvature(mesh: SurfaceMesh, hx: float, ht: float) -> np.ndarray:
    """K = (LN - M^2)/(EG - F^2) from central differences at interior vertices."""
    r = mesh.vertices
    rx = (r[2:, 1:-1] - r[:-2, 1:-1]) / (2 * hx)
    rt = (r[1:-1, 2:] - r[1:-1, :-2]) / (2 * ht)
    rxx = (r[2:, 1:-1] - 2 * r[1:-1, 1:-1] + r[:-2, 1:-1]) / hx ** 2
    rtt = (r[1:-1, 2:] - 2 * r[1:-1, 1:-1] + r[1:-1, :-2]) / ht ** 2
    rxt = (r[2:, 2:] - r[2:, :-2] - r[:-2, 2:] + r[:-2, :-2]) / (4 * hx * ht)
    nrm = np.cross(rx, rt)
    nrm /= np.linalg.norm(nrm, axis=-1, keepdims=True)
    E, F, G = (np.sum(a * b, -1) for a, b in ((rx, rx), (rx, rt), (rt, rt)))
    L, M, Nn = (np.sum(a * nrm, -1) for a in (rxx, rxt, rtt))
    return (L * Nn - M * M) / (E * G - F * F)


def edge_lengths(mesh: SurfaceMesh):
    r = mesh.vertices
    return (np.linalg.norm(np.diff(r, axis=0), axis=-1),
            np.linalg.norm(np.diff(r, axis=1), axis=-1))


# -- patches ---------------------------------------------------------------------

def patch_from_function(f, x, t, provenance: str = "") -> SolutionPatch:
    X, T = np.meshgrid(x, t, indexing="ij")
    return SolutionPatch(x, t, f(X, T), provenance=provenance)


def kink_patch(nx: int = 41, nt: int = 41, x_range=(-1.4, -0.4), t_range=(-0.9, 0.1),
               a: float = 1.3) -> SolutionPatch:
    """u = 4 arctan(exp(a x + t/a)), an exact solution of u_xt = sin(u)."""
    x = np.linspace(*x_range, nx)
    t = np.linspace(*t_range, nt)
    return patch_from_function(lambda X, T: 4 * np.arctan(np.exp(a * X + T / a)), x, t,
                               provenance=f"kink a={a:g}")


def nonsolution_patch(nx: int = 41, nt: int = 41, amplitude: float = 0.8) -> SolutionPatch:
    """pi/2 + A sin(2x) cos(3t) on [0, 1]^2; violates u_xt = sin(u), a negative control."""
    x = np.linspace(0.0, 1.0, nx)
    t = np.linspace(0.0, 1.0, nt)
    return patch_from_function(lambda X, T: np.pi / 2 + amplitude * np.sin(2 * X) * np.cos(3 * T),
                               x, t, provenance=f"non-solution A={amplitude:g}")


# -- export ------------------------------------------------------------------------

def _fmt(v):
    return " ".join(f"{c:.8e}" for c in v)


def export_obj(mesh: SurfaceMesh, path) -> Path:
    """Write an ASCII Wavefront OBJ (v, vn, triangulated f) with 9 significant digits."""
    n, m = mesh.shape
    if n < 2 or m < 2:
        raise IoFailure("cannot export an empty mesh")
    lines = ["# pseudospherical surface, Chebyshev net", f"# grid {n} x {m}"]
    lines += ["v " + _fmt(p) for p in mesh.vertices.reshape(-1, 3)]
    lines += ["vn " + _fmt(p) for p in mesh.normals.reshape(-1, 3)]
    lines += ["f " + " ".join(f"{i + 1}//{i + 1}" for i in tri) for tri in mesh.faces]
    path = Path(path)
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as err:
        raise IoFailure(str(err)) from err
    return path


def read_obj(path):
    """Vertices, normals and faces (0-based) of an OBJ written by export_obj."""
    verts, norms, faces = [], [], []
    for line in Path(path).read_text().splitlines():
        tag, *rest = line.split() or [""]
        if tag == "v":
            verts.append([float(c) for c in rest])
        elif tag == "vn":
            norms.append([float(c) for c in rest])
        elif tag == "f":
            faces.append([int(c.split("/")[0]) - 1 for c in rest])
    return np.array(verts), np.array(norms), np.array(faces, dtype=int)
