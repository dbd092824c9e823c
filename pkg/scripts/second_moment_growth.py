"""Centered primitive second moment over a decade grid, with the per-decade ratio to log T."""

import argparse
import math

import numpy as np
from scipy.stats import kendalltau

from spiralcount.moment2d import ky_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--decades", type=int, default=4)
    a = ap.parse_args()

    Ts = [10.0 ** k for k in range(1, a.decades + 1)]
    ratios = []
    print(f"{'T':>10}{'ky':>16}{'centered':>14}{'/log T':>10}{'sum eps_y4':>13}")
    for T in Ts:
        r = ky_report(a.c, T)
        ratios.append(r.centered / math.log(T))
        print(f"{T:10.0f}{r.value:16.6f}{r.centered:14.6f}{ratios[-1]:10.5f}{r.eps_y4:13.3e}")
    print("# increments", np.diff(ratios))
    tau = kendalltau(range(len(Ts)), ratios, alternative="greater")
    print(f"# Kendall tau {tau.statistic:.3f}, one-sided p {tau.pvalue:.4f}")


if __name__ == "__main__":
    main()
