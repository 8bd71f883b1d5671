"""Density snapshots for the symmetric and skewed example models.

Writes one CLI run directory per sweep under OUT (default ./runs).
"""

import argparse
import sys

from stablefpe.cli import main


def run(out: str, J: int) -> int:
    sweeps = [
        ["fpe", "solve", "--preset", "example1", "--J", str(J), "--alpha", "0.5", "1.5",
         "--g", "0", "0.5", "--snapshots", "0.05,0.1,0.2", "--out", f"{out}/symmetric"],
        ["fpe", "asym", "--preset", "example2", "--J", str(J), "--alpha", "0.5", "1.5",
         "--beta", "0", "0.5", "--snapshots", "0.05,0.1,0.2", "--out", f"{out}/skewed"],
    ]
    for argv in sweeps:
        code = main(argv)
        if code:
            return code
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs")
    ap.add_argument("--J", type=int, default=64)
    a = ap.parse_args()
    sys.exit(run(a.out, a.J))
