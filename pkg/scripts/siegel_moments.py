"""Haar Monte Carlo moments on planar unimodular lattices for P_{T,c}, next to their closed forms."""

import argparse
import math

from spiralcount.geometry import PRegion
from spiralcount.haar import mc_all_moments
from spiralcount.moment2d import ky_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=float, default=10.0)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args()

    region = PRegion(2, T=a.T, c=a.c)
    est = mc_all_moments(region, a.samples, a.seed, a.threads)
    print(f"# P_(T={a.T}, c={a.c}), {a.samples} Haar samples, seed {a.seed}")
    print(f"{'statistic':<18}{'estimate':>12}{'std err':>11}{'target':>12}{'z':>8}")
    for name, e in est.items():
        tgt = "" if e.target is None else f"{e.target:12.6f}"
        z = "" if e.z is None else f"{e.z:8.2f}"
        print(f"{name:<18}{e.estimate:12.6f}{e.std_error:11.6f}{tgt:>12}{z:>8}")
    rep = ky_report(a.c, a.T)
    print(f"# centered second moment {rep.centered:.6f}, over log T {rep.centered / math.log(a.T):.6f}")


if __name__ == "__main__":
    main()
