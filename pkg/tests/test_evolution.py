import numpy as np
import pytest

from oracles import linear_flow
from sgmkdv import evolution as ev
from sgmkdv import phase_space as ps
from sgmkdv import spectral as sp
from sgmkdv.errors import NotOnMsinh, OnRamificationLocus, ResolutionLoss
from sgmkdv.evolution import EvolveConfig
from sgmkdv.phase_space import SingFamilyParams
from sgmkdv.spectral import WindingFunction

TWO_PI = 2 * np.pi


def cos_mode(n, a=0.1, m=1, k=0):
    return np.pi * k + a * np.cos(TWO_PI * m * sp.nodes(n))


def test_config_validation():
    with pytest.raises(ValueError):
        EvolveConfig(0.0, 1.0)
    with pytest.raises(ValueError):
        EvolveConfig(2.0, 1.0)
    with pytest.raises(ValueError):
        EvolveConfig(0.1, 1.0, equation="kdv")
    with pytest.raises(ValueError):
        EvolveConfig(0.1, 1.0, record_stride=0)
    assert EvolveConfig(0.3, 1.0).steps == 3


@pytest.mark.parametrize("equation", ev.EQUATIONS)
def test_equilibrium_is_constant(equation):
    tr = ev.evolve_v(np.zeros(32), EvolveConfig(0.05, 1.0, equation=equation))
    assert len(tr) == 21
    assert all(np.all(s == 0) for s in tr.states)
    u = ev.evolve_u_direct(WindingFunction(0, np.zeros(32)),
                           EvolveConfig(0.05, 1.0, equation=equation, form="u_form"))
    assert all(np.all(s.values == 0) for s in u.states)


@pytest.mark.parametrize("m", [1, 2])
def test_linearized_flow(m):
    n, a = 64, 0.01
    x = sp.nodes(n)
    tr = ev.evolve_v(cos_mode(n, a, m), EvolveConfig(1e-2, 5.0, record_stride=10))
    err = max(np.max(np.abs(v - linear_flow(x, t, a, m))) for t, v in zip(tr.times, tr.states))
    # the first correction is cubic in the amplitude
    assert err <= 0.05 * a ** 3


def test_sine_conservation_short():
    tr = ev.evolve_v(cos_mode(128), EvolveConfig(1e-3, 2.0, record_stride=100))
    H = tr.series("H")
    assert np.max(np.abs(H - H[0])) <= 1e-8
    assert np.max(np.abs(tr.series("constraint"))) <= 1e-10
    assert np.max(np.abs(tr.series("mean_v") - tr.series("mean_v")[0])) <= 1e-14


def test_sinh_conservation_short():
    tr = ev.evolve_v(cos_mode(128), EvolveConfig(1e-3, 2.0, equation="sinh_gordon", record_stride=100))
    H = tr.series("H")
    assert np.max(np.abs(H - H[0])) <= 1e-8
    assert np.max(np.abs(tr.series("constraint"))) <= 1e-10


def test_winding_sector_keeps_mean():
    v0 = cos_mode(64, 0.3, 1, k=1)
    tr = ev.evolve_v(v0, EvolveConfig(1e-2, 1.0))
    assert np.allclose(tr.series("mean_v"), np.pi, atol=1e-13)


def test_sinh_rejects_nonzero_mean():
    with pytest.raises(ValueError):
        ev.evolve_v(np.full(16, 0.5), EvolveConfig(0.1, 1.0, equation="sinh_gordon"))
    with pytest.raises(NotOnMsinh):
        ev.evolve_u_direct(WindingFunction(0, np.full(16, 0.5)),
                           EvolveConfig(0.1, 1.0, equation="sinh_gordon", form="u_form"))


def test_u_form_matches_v_form():
    v0 = cos_mode(128)
    tv = ev.evolve_v(v0, EvolveConfig(1e-3, 1.0, record_stride=100))
    tu = ev.evolve_u_direct(ps.psi_sg_plus(v0), EvolveConfig(1e-3, 1.0, form="u_form", record_stride=100))
    assert tv.times == tu.times
    assert max(a.distance(b) for a, b in zip(tv.u_states(), tu.u_states())) <= 1e-6
    assert np.max(np.abs(tu.series("constraint"))) <= 1e-8


def test_u_form_sinh_matches_v_form():
    v0 = cos_mode(64, 0.3)
    tv = ev.evolve_v(v0, EvolveConfig(1e-3, 0.5, equation="sinh_gordon", record_stride=50))
    tu = ev.evolve_u_direct(ps.psi_sh(v0), EvolveConfig(1e-3, 0.5, equation="sinh_gordon",
                                                        form="u_form", record_stride=50))
    assert max(a.distance(b) for a, b in zip(tv.u_states(), tu.u_states())) <= 1e-6


def test_mu_is_rate_of_phase(rng):
    v0 = sp.random_trig_poly(rng, 64, 4, 0.8)
    tr = ev.evolve_v(v0, EvolveConfig(1e-3, 0.2))
    t = np.array(tr.times)
    c = np.unwrap([ps.c_sg(v) for v in tr.states])
    fd = np.gradient(c, t, edge_order=2)
    mu = tr.series("mu")
    assert np.max(np.abs(fd - mu)) <= 1e-5
    assert np.max(np.abs(fd - mu)) <= 1e-4 * np.max(np.abs(mu))


def test_mu_diverges_toward_linear():
    x = sp.nodes(128)
    mus, prods = [], []
    for d in (1e-1, 1e-2, 1e-3, 1e-4):
        u = ps.project_to_msin(WindingFunction(1, d * np.sin(TWO_PI * x)))
        C = sp.quadrature(u.cos())
        mu = ev.mean_drift_mu(u)
        mus.append(abs(mu))
        prods.append(mu * C)
    assert np.all(np.diff(mus) > 0)
    assert mus[-1] > 1e3
    # mu * int cos(u) -> -K1(2 pi x) = 1 / (4 pi)
    assert prods[-1] == pytest.approx(1 / (4 * np.pi), rel=1e-3)


def test_mean_drift_mu_raises_on_sing():
    with pytest.raises(OnRamificationLocus):
        ev.mean_drift_mu(WindingFunction(1, np.zeros(32)))
    assert ev.mean_drift_mu(WindingFunction(0, np.zeros(32))) == 0.0


def test_u_direct_from_sing_aborts_at_zero():
    with pytest.raises(OnRamificationLocus) as info:
        ev.evolve_u_direct(WindingFunction(1, np.zeros(64)), EvolveConfig(1e-3, 0.1, form="u_form"))
    err = info.value
    assert err.time == 0.0
    assert len(err.trajectory) == 1
    assert err.trajectory.max_abs_mu > 1e3


def test_u_direct_near_sing_aborts():
    x = sp.nodes(128)
    u0 = ps.project_to_msin(WindingFunction(1, 1e-4 * np.sin(TWO_PI * x) + 2e-4 * np.cos(2 * TWO_PI * x)))
    with pytest.raises(OnRamificationLocus) as info:
        ev.evolve_u_direct(u0, EvolveConfig(1e-3, 1.0, form="u_form"))
    err = info.value
    assert err.time > 0
    assert err.trajectory.max_abs_mu > 1e3
    assert err.trajectory.mu_trace[0][0] == 0.0


def test_resolution_loss():
    v0 = cos_mode(16, 8.0)
    with pytest.raises(ResolutionLoss) as info:
        ev.evolve_v(v0, EvolveConfig(1e-2, 5.0))
    assert info.value.time > 0
    assert len(info.value.trajectory) >= 1


def test_trajectory_u_states_sinh():
    tr = ev.evolve_v(cos_mode(32), EvolveConfig(0.1, 0.2, equation="sinh_gordon"))
    us = tr.u_states()
    assert all(abs(sp.quadrature(np.sinh(u.values))) < 1e-12 for u in us)


class TestSingProbe:
    def test_linear_is_obstructed(self):
        rep = ev.sing_probe(WindingFunction(1, np.zeros(128)))
        assert rep.verdict == "obstructed"
        assert rep.K1 == pytest.approx(-1 / (4 * np.pi), abs=1e-12)
        mus = [abs(p["mu"]) for p in rep.profile]
        assert np.all(np.diff(mus) > 0)
        assert mus[-1] > 1e4
        assert set(rep.as_dict()) == {"K1", "tol", "verdict", "profile"}

    def test_symmetric_tent_not_obstructed(self):
        # K1(w_1(1/2)) vanishes by the reflection symmetry of the tent
        rep = ev.sing_probe(ps.sing_family_w(SingFamilyParams(1, 0.5), 128))
        assert abs(rep.K1) <= 1e-8
        assert rep.verdict == "not obstructed"

    def test_off_root_member_obstructed(self):
        rep = ev.sing_probe(ps.sing_family_w(SingFamilyParams(1, 0.6), 640))
        assert rep.verdict == "obstructed"
        assert rep.K1 == pytest.approx(ps.k1_closed_form(1, 0.6), abs=1e-8)

    def test_rejects_regular_point(self):
        with pytest.raises(ValueError):
            ev.sing_probe(WindingFunction(0, np.zeros(32)))


def test_trajectory_until():
    tr = ev.evolve_v(cos_mode(32), EvolveConfig(0.1, 1.0))
    head = tr.until(0.5)
    assert head.times == tr.times[:6]
    assert np.array_equal(head.series("H"), tr.series("H")[:6])
