import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sgmkdv import spectral as sp
from sgmkdv.errors import NonIntegerMean, NonZeroMean
from sgmkdv.spectral import PeriodicGrid, WindingFunction

TWO_PI = 2 * np.pi


def test_grid_validation():
    with pytest.raises(ValueError):
        PeriodicGrid(7)
    with pytest.raises(ValueError):
        PeriodicGrid(6)
    g = PeriodicGrid(16)
    assert g.nodes[1] == pytest.approx(1 / 16)
    assert g.nodes.size == 16


def test_transform_pure_mode():
    x = sp.nodes(16)
    c = sp.transform(np.cos(TWO_PI * x))
    nz = np.flatnonzero(np.abs(c) > 1e-14)
    assert sorted(nz) == [1, 15]
    assert c[1] == pytest.approx(0.5)


def test_transform_constant():
    c = sp.transform(np.full(16, 3.0))
    assert c[0] == pytest.approx(3.0)
    assert np.max(np.abs(c[1:])) < 1e-15


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([8, 16, 64, 128]))
def test_round_trip(seed, n):
    f = np.random.default_rng(seed).normal(size=n)
    assert np.max(np.abs(sp.inverse_transform(sp.transform(f)) - f)) <= 1e-13


@pytest.mark.parametrize("n", [16, 64])
def test_antiderivative_termwise(n):
    x = sp.nodes(n)
    assert np.allclose(sp.antiderivative(np.cos(TWO_PI * x)), np.sin(TWO_PI * x) / TWO_PI, atol=1e-14)
    assert np.allclose(sp.antiderivative(np.zeros(n)), 0)
    v = np.sin(TWO_PI * x) + np.cos(2 * TWO_PI * x)
    ref = -np.cos(TWO_PI * x) / TWO_PI + np.sin(2 * TWO_PI * x) / (2 * TWO_PI)
    assert np.allclose(sp.antiderivative(v), ref, atol=1e-14)


def test_antiderivative_rejects_mean():
    with pytest.raises(NonZeroMean):
        sp.antiderivative(np.ones(16))


@given(st.integers(0, 2 ** 31 - 1))
def test_derivative_inverts_antiderivative(seed):
    v = sp.random_trig_poly(np.random.default_rng(seed), 64, 6, 1.0)
    F = sp.antiderivative(v)
    assert abs(sp.quadrature(F)) < 1e-14
    assert np.max(np.abs(sp.derivative(F) - v)) < 1e-12


def test_lift_constant_pi():
    w = sp.lift(np.full(32, np.pi))
    assert w.k == 1
    assert np.max(np.abs(w.periodic)) < 1e-14
    assert np.allclose(w.values, TWO_PI * sp.nodes(32))


def test_lift_mean_zero():
    x = sp.nodes(32)
    w = sp.lift(0.5 * np.cos(TWO_PI * x))
    # lift returns 2 d^-1 v
    assert w.k == 0
    assert np.allclose(w.periodic, np.sin(TWO_PI * x) / TWO_PI, atol=1e-14)


def test_antiderivative_affine_derivative_check():
    x = sp.nodes(64)
    v = np.pi + np.sin(TWO_PI * x)
    k, p = sp.antiderivative_affine(v)
    assert k == 1
    assert abs(sp.quadrature(p)) < 1e-15
    assert np.max(np.abs(np.pi + sp.derivative(p) - v)) < 1e-12


def test_antiderivative_affine_rejects_fractional_mean():
    with pytest.raises(NonIntegerMean):
        sp.antiderivative_affine(np.full(16, 1.0))


def test_quadrature_examples():
    x = sp.nodes(32)
    assert abs(sp.quadrature(np.cos(TWO_PI * x))) < 1e-16
    assert sp.quadrature(np.full(32, 2.5)) == pytest.approx(2.5)
    assert sp.quadrature(np.cos(TWO_PI * x) ** 2) == pytest.approx(0.5, abs=1e-15)


def test_nyquist_mode_is_annihilated():
    x = sp.nodes(16)
    f = np.cos(np.pi * 16 * x)  # alternating +-1
    assert np.max(np.abs(sp.derivative(f))) < 1e-12


def test_interpolation_is_exact_for_band_limited():
    x = sp.nodes(32)
    f = lambda s: np.sin(TWO_PI * s) + 0.3 * np.cos(3 * TWO_PI * s)
    xs = np.linspace(0, 1, 17) + 0.013
    assert np.max(np.abs(sp.interpolate(f(x), xs) - f(xs))) < 1e-13


def test_resample_with_offset():
    x = sp.nodes(16)
    f = np.cos(TWO_PI * x) + 0.2 * np.sin(2 * TWO_PI * x)
    g = sp.resample(f, 64, 0.5)
    xs = (np.arange(64) + 0.5) / 64
    assert np.allclose(g, np.cos(TWO_PI * xs) + 0.2 * np.sin(2 * TWO_PI * xs), atol=1e-13)


def test_reflect_matches_minus_x():
    x = sp.nodes(16)
    f = np.sin(TWO_PI * x) + np.cos(2 * TWO_PI * x)
    assert np.allclose(sp.reflect(f), np.sin(-TWO_PI * x) + np.cos(-2 * TWO_PI * x), atol=1e-14)


def test_spectral_tail():
    x = sp.nodes(64)
    assert sp.spectral_tail(np.cos(TWO_PI * x)) < 1e-28
    assert sp.spectral_tail(np.cos(25 * TWO_PI * x)) == pytest.approx(1.0)
    assert sp.spectral_tail(np.full(64, 4.0)) == 0.0


class TestWindingFunction:
    def test_values_and_call(self):
        w = WindingFunction(2, 0.1 * np.sin(TWO_PI * sp.nodes(32)))
        assert w(1.25) == pytest.approx(w(0.25) + 4 * np.pi)
        assert np.allclose(w(sp.nodes(32)), w.values)

    def test_from_values_round_trip(self):
        w = WindingFunction(1, np.cos(TWO_PI * sp.nodes(16)))
        again = WindingFunction.from_values(w.values, 1)
        assert w.distance(again) < 1e-14

    def test_derivative_of_linear(self):
        w = WindingFunction(3, np.zeros(16))
        assert np.allclose(w.derivative(), 6 * np.pi)
        assert np.allclose(w.second_derivative(), 0)

    def test_reflect_flips_charge(self):
        w = WindingFunction(2, np.sin(TWO_PI * sp.nodes(16)))
        r = w.reflect()
        assert r.k == -2
        assert r.reflect().distance(w) < 1e-15

    def test_mean(self):
        assert WindingFunction(1, np.zeros(16)).mean() == pytest.approx(np.pi)

    def test_distance_charge_mismatch(self):
        a, b = WindingFunction(0, np.zeros(8)), WindingFunction(1, np.zeros(8))
        assert a.distance(b) == np.inf

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            WindingFunction(0, np.array([0, 1, np.nan, 0, 0, 0, 0, 0.0]))
