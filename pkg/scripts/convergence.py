"""Self-convergence of the symmetric scheme on a natural grid."""

import argparse

from stablefpe import presets
from stablefpe.experiments import convergence_study

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, nargs="+", default=[0.5, 1.5])
    ap.add_argument("--h0", type=float, default=0.125)
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--L-tilde", type=float, default=10.0)
    a = ap.parse_args()
    for alpha in a.alpha:
        res = convergence_study(presets.example1(alpha), L_tilde=a.L_tilde, h0=a.h0, levels=a.levels, M_tilde=3.0)
        print(f"alpha={alpha}  h_ref={res.h_ref:g}  slope={res.slope:.2f}  monotone={res.monotone}")
        for h, dt, e in zip(res.h, res.dt, res.errors):
            print(f"  h={h:<8g} dt={dt:<10.3e} max error={e:.3e}")
