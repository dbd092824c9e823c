"""Fraction of Dirichlet approximates whose error direction lies in a cap, averaged over random x."""

import argparse

from spiralcount.geometry import SphericalCap, cap_measure
from spiralcount.harness import SweepConfig, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=2, help="dimension of x")
    ap.add_argument("--angle", type=float, default=None, help="cap half-angle (default: hemisphere)")
    ap.add_argument("--replications", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()

    axis = tuple([1.0] + [0.0] * (a.dim - 1))
    cap = SphericalCap.hemisphere(axis) if a.angle is None else SphericalCap(a.dim - 1, axis, a.angle)
    grid = [1e2, 1e3, 1e4, 1e5]
    res = run_sweep(SweepConfig(kind="spiral", d=a.dim + 1, T_grid=grid, cap=cap.to_dict(),
                                replications=a.replications, seed=a.seed))
    print(f"# cap measure {cap_measure(cap):.6f}")
    for T, r in zip(res.average.T, res.average.statistic):
        print(f"{T:10.0f}{r:10.5f}")


if __name__ == "__main__":
    main()
