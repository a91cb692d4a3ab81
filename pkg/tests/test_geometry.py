import numpy as np
import pytest

from oracles import kink
from sgmkdv import geometry as geo
from sgmkdv.errors import CompatibilityFailure, DegenerateMetric, IoFailure
from sgmkdv.geometry import FrameState, SolutionPatch, SurfaceMesh


def flat_patch(value=np.pi / 2, n=9):
    x = np.linspace(0, 1, n)
    return SolutionPatch(x, x.copy(), np.full((n, n), value))


def test_patch_validation():
    with pytest.raises(ValueError):
        SolutionPatch(np.linspace(0, 1, 5), np.linspace(0, 1, 6), np.zeros((5, 5)))
    with pytest.raises(ValueError):
        SolutionPatch(np.linspace(0, 1, 4), np.linspace(0, 1, 4), np.zeros((4, 4)))


def test_forms_right_angle():
    ff = geo.fundamental_forms(flat_patch())
    assert np.allclose(ff.g11, 1) and np.allclose(ff.g22, 1)
    assert np.allclose(ff.g12, 0, atol=1e-15)
    assert np.allclose(ff.A12, 1)


def test_forms_determinant(rng):
    u = rng.uniform(0.3, np.pi - 0.3, (6, 7))
    ff = geo.fundamental_forms(SolutionPatch(np.arange(6.0), np.arange(7.0), u))
    assert np.max(np.abs(ff.det_g - np.sin(u) ** 2)) <= 1e-12


def test_forms_degenerate():
    with pytest.raises(DegenerateMetric):
        geo.fundamental_forms(flat_patch(0.01))
    with pytest.raises(DegenerateMetric):
        geo.reconstruct_surface(flat_patch(np.pi - 0.01))


def test_fd4_and_midpoints_are_fourth_order():
    errs = []
    for n in (21, 41):
        x = np.linspace(0, 1, n)
        h = x[1] - x[0]
        d = geo.fd4(np.sin(3 * x), h)
        m = geo.midpoints4(np.sin(3 * x))
        errs.append((np.max(np.abs(d - 3 * np.cos(3 * x))),
                     np.max(np.abs(m - np.sin(3 * (x[:-1] + h / 2))))))
    assert errs[0][0] / errs[1][0] > 12
    assert errs[0][1] / errs[1][1] > 12


def test_frame_along_right_angle_line():
    f = FrameState.initial(np.pi / 2)
    u3 = (np.pi / 2,) * 3
    for _ in range(10):
        f = geo.gauss_weingarten_step(f, u3, (0.0, 0.0, 0.0), "x", 0.1)
    # r moves on a straight line; e2 and N twist about e1 at unit rate (torsion of an asymptotic line)
    assert np.allclose(f.r, [1.0, 0, 0])
    assert np.allclose(f.e1, [1, 0, 0])
    assert np.allclose(f.e2, [0, np.cos(1.0), np.sin(1.0)], atol=1e-8)


def test_step_validation():
    f = FrameState.initial(1.0)
    with pytest.raises(ValueError):
        geo.gauss_weingarten_step(f, (1, 1, 1), (0, 0, 0), "y", 0.1)
    with pytest.raises(DegenerateMetric):
        geo.gauss_weingarten_step(f, (0.01, 0.01, 0.01), (0, 0, 0), "x", 0.1)


def test_frame_invariants_on_solution():
    rec = geo.reconstruct_surface(geo.kink_patch())
    Y = rec.frames
    e1, e2, N = Y[..., 1, :], Y[..., 2, :], Y[..., 3, :]
    assert rec.unit_error <= 1e-8
    assert rec.angle_error <= 1e-4
    assert np.max(np.abs(np.sum(N * e1, -1))) < 1e-12
    assert np.max(np.abs(np.sum(N * e2, -1))) < 1e-12


def test_kink_patch_is_a_solution():
    p = geo.kink_patch(nx=81, nt=81)
    assert p.u.min() > 0.3 and p.u.max() < np.pi - 0.3
    assert np.allclose(p.u, kink(p.x[:, None], p.t[None, :], 1.3))
    ux = geo.fd4(p.u, p.hx, 0)
    uxt = geo.fd4(ux, p.ht, 1)
    assert np.max(np.abs(uxt - np.sin(p.u))) < 1e-5


def test_residual_second_order():
    res = [geo.reconstruct_surface(geo.kink_patch(n, n)).residual for n in (21, 41, 81)]
    ratios = np.array(res[:-1]) / np.array(res[1:])
    assert np.all((ratios > 3.2) & (ratios < 5.0)), ratios


def test_curvature_and_chebyshev_property():
    p = geo.kink_patch()
    rec = geo.reconstruct_surface(p)
    K = geo.discrete_gaussian_curvature(rec.mesh, p.hx, p.ht)
    assert abs(K.mean() + 1) <= 0.05
    assert np.max(np.abs(K + 1)) <= 0.05
    ex, et = geo.edge_lengths(rec.mesh)
    assert np.max(np.abs(ex / p.hx - 1)) <= 0.01
    assert np.max(np.abs(et / p.ht - 1)) <= 0.01


def test_non_solution_rejected():
    with pytest.raises(CompatibilityFailure) as info:
        geo.reconstruct_surface(geo.nonsolution_patch())
    assert info.value.residual > 1e-2


def test_periodic_patch_uses_spectral_x():
    # a t-independent patch that is periodic in x (not a solution; only the derivative path is exercised)
    x = np.arange(32) / 32
    t = np.linspace(0, 0.1, 6)
    u = np.pi / 2 + 0.3 * np.sin(2 * np.pi * x)[:, None] * np.ones_like(t)
    p = SolutionPatch(x, t, u, periodic_x=True)
    ux, ut = geo._derivatives(p)
    assert np.allclose(ux[:, 0], 0.6 * np.pi * np.cos(2 * np.pi * x), atol=1e-12)
    assert np.allclose(ut, 0, atol=1e-12)


class TestObj:
    def test_counts(self, tmp_path):
        mesh = SurfaceMesh(np.arange(12.0).reshape(2, 2, 3), np.ones((2, 2, 3)))
        path = geo.export_obj(mesh, tmp_path / "m.obj")
        lines = path.read_text().splitlines()
        assert sum(line.startswith("v ") for line in lines) == 4
        assert sum(line.startswith("vn ") for line in lines) == 4
        assert sum(line.startswith("f ") for line in lines) == 2
        assert len(mesh.faces) == 2

    def test_round_trip(self, tmp_path):
        rec = geo.reconstruct_surface(geo.kink_patch(11, 9))
        path = geo.export_obj(rec.mesh, tmp_path / "k.obj")
        v, n, f = geo.read_obj(path)
        assert v.shape == (99, 3) and n.shape == (99, 3)
        assert np.allclose(v, rec.mesh.vertices.reshape(-1, 3), rtol=1e-8, atol=1e-12)
        assert f.shape == (2 * 10 * 8, 3)
        assert f.min() == 0 and f.max() == 98

    def test_deterministic(self, tmp_path):
        mesh = geo.reconstruct_surface(geo.kink_patch(11, 11)).mesh
        a = geo.export_obj(mesh, tmp_path / "a.obj").read_bytes()
        b = geo.export_obj(geo.reconstruct_surface(geo.kink_patch(11, 11)).mesh, tmp_path / "b.obj").read_bytes()
        assert a == b

    def test_empty_mesh(self, tmp_path):
        with pytest.raises(IoFailure):
            geo.export_obj(SurfaceMesh(np.zeros((1, 0, 3)), np.zeros((1, 0, 3))), tmp_path / "e.obj")

    def test_unwritable(self, tmp_path):
        mesh = SurfaceMesh(np.zeros((2, 2, 3)), np.zeros((2, 2, 3)))
        with pytest.raises(IoFailure):
            geo.export_obj(mesh, tmp_path / "missing" / "x.obj")
