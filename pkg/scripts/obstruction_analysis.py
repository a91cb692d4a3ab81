"""The obstruction K1 on the w-family and the mean drift near u = 2 pi x.

Part 1 tabulates K1(w_k(r)) against the corrected closed form
(k(1-r)^2 - r^2) / (4 k pi) and the variant (k(1-r) - r^2) / (4 k pi).
Part 2 samples initial data near 2 pi x on the sine constraint and compares the
drift |mu| seen before the u-form integrator aborts with the exact-flow value
|K1| / |int cos u|, which stays constant because int cos u is conserved.

    python3 scripts/obstruction_analysis.py
"""
import numpy as np

from sgmkdv import evolution as ev
from sgmkdv import phase_space as ps
from sgmkdv import spectral as sp
from sgmkdv.errors import OnRamificationLocus
from sgmkdv.phase_space import SingFamilyParams
from sgmkdv.spectral import WindingFunction


def family_table(n=640):
    print("k   r     K1(sampled)     corrected       variant")
    for k in (1, 2, 3):
        for r in [j / 10 for j in range(1, 10)]:
            K1 = ps.obstruction_K1(ps.sing_family_w(SingFamilyParams(k, r), n))
            variant = (k * (1 - r) - r ** 2) / (4 * k * np.pi)
            print(f"{k}  {r:.1f}  {K1:+.10f}  {ps.k1_closed_form(k, r):+.10f}  {variant:+.10f}")
        print(f"   root: sampled {ps.locate_k1_root(k):.8f}, sqrt(k)/(1+sqrt(k)) = {ps.k1_root(k):.8f}")


def drift_near_linear(samples=30, n=128, seed=8):
    rng = np.random.default_rng(seed)
    base = WindingFunction(1, np.zeros(n))
    cfg = ev.EvolveConfig(1e-3, 1.0, form="u_form", record_stride=100)
    print("\ndistance   int cos u    exact |mu|   max|mu| seen   abort t   reason")
    for _ in range(samples):
        h = sp.random_trig_poly(rng, n, 4, 1.0)
        h /= np.max(np.abs(h))
        u0 = ps.project_to_msin(WindingFunction(1, rng.uniform(0.05, 0.9) * 1e-3 * h))
        C = sp.quadrature(u0.cos())
        try:
            tr = ev.evolve_u_direct(u0, cfg)
            seen, t, why = tr.max_abs_mu, "-", "completed"
        except OnRamificationLocus as err:
            seen, t = err.trajectory.max_abs_mu, f"{err.time:.3f}"
            why = err.info.get("reason", "cos integral")
        print(f"{u0.distance(base):.2e}  {C:+.3e}  {abs(ev.mean_drift_mu(u0)):10.3g}  {seen:13.3g}  "
              f"{t:>8}  {why}")
    print("\n|mu| > 1e3 needs |int cos u| < |K1| / 1e3 ~ 8e-5; the 1e-3 ball reaches |int cos u| ~ 7e-4.")


if __name__ == "__main__":
    family_table()
    drift_near_linear()
