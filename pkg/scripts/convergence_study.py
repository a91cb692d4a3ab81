"""Time-step and mesh convergence: RK4 order, isospectral drift per chain, surface residual.

    python3 scripts/convergence_study.py [--quick]
"""
import argparse

import numpy as np

from sgmkdv import evolution as ev
from sgmkdv import floquet as fq
from sgmkdv import geometry as geo
from sgmkdv import spectral as sp


def rk4_order(n=64, a=1.0, t_end=1.0, dts=(0.04, 0.02, 0.01, 0.005)):
    v0 = a * np.cos(2 * np.pi * sp.nodes(n))
    ref = ev.evolve_v(v0, ev.EvolveConfig(dts[-1] / 8, t_end, record_stride=10 ** 9)).states[-1]
    errs = [np.max(np.abs(ev.evolve_v(v0, ev.EvolveConfig(dt, t_end, record_stride=10 ** 9)).states[-1] - ref))
            for dt in dts]
    return list(zip(dts, errs))


def drift_ladder(a, dts, t_end, n=64):
    lams = np.linspace(-5, 40, 10)
    v0 = a * np.cos(2 * np.pi * sp.nodes(n))
    rows = []
    for dt in dts:
        tr = ev.evolve_v(v0, ev.EvolveConfig(dt, t_end, record_stride=max(1, round(0.25 / dt))))
        rows.append((dt, *(fq.isospectrality_drift(tr, lams, c) for c in fq.CHAINS)))
    return rows


def ratios(col):
    col = np.asarray(col)
    return np.round(col[:-1] / col[1:], 2).tolist()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()

    print("RK4 state error at t=1 (a=1, n=64)")
    rows = rk4_order()
    for dt, e in rows:
        print(f"  dt={dt:<7g} err={e:.3e}")
    print("  halving ratios:", ratios([e for _, e in rows]))

    ladders = ((0.1, (2e-2, 1e-2, 5e-3), 1.0), (1.0, (0.4, 0.2, 0.1) if args.quick else (0.4, 0.2, 0.1, 0.05), 5.0))
    for a, dts, t_end in ladders:
        print(f"\nisospectral drift over t in [0, {t_end:g}], amplitude {a}")
        rows = drift_ladder(a, dts, t_end)
        print("  dt        " + "  ".join(f"{c:>10}" for c in fq.CHAINS))
        for dt, *d in rows:
            print(f"  {dt:<8g}  " + "  ".join(f"{x:10.3e}" for x in d))
        for j, c in enumerate(fq.CHAINS):
            print(f"  {c} halving ratios:", ratios([r[j + 1] for r in rows]))

    print("\nsurface compatibility residual (kink patch)")
    sizes = (21, 41) if args.quick else (21, 41, 81, 161)
    res = [geo.reconstruct_surface(geo.kink_patch(m, m)).residual for m in sizes]
    for m, r in zip(sizes, res):
        print(f"  n={m:<4d} residual={r:.3e}")
    print("  observed orders:", np.round(np.log2(np.array(res[:-1]) / np.array(res[1:])), 2).tolist())


if __name__ == "__main__":
    main()
