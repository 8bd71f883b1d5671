"""Filter mean against the observation-free prior mean over many seeds."""

import argparse

from stablefpe import presets
from stablefpe.experiments import tracking_experiment

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--gain", type=float, default=2.5)
    a = ap.parse_args()
    outcomes = tracking_experiment(presets.filter_informative(a.alpha, gain=a.gain), seeds=range(a.seeds))
    for o in outcomes:
        print(f"seed {o.seed:3d}  jumps {o.n_jumps:4d}  filter {o.filter_error:.3f}  prior {o.prior_error:.3f}")
    wins = sum(o.filter_wins for o in outcomes)
    print(f"filter closer than prior in {wins}/{len(outcomes)} runs")
