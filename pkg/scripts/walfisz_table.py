"""Residual of sum_{n <= N} phi(n)/n against N/zeta(2), with the Walfisz envelope."""

import argparse

from spiralcount.numtheory import phi_ratio_cumsum, walfisz_envelope, zeta


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-power", type=int, default=7)
    a = ap.parse_args()
    S = phi_ratio_cumsum(10 ** a.max_power)
    print(f"{'N':>10}{'residual':>12}{'envelope':>11}{'ratio':>9}")
    for k in range(1, a.max_power + 1):
        N = 10 ** k
        r = S[N] - N / zeta(2.0)
        e = float(walfisz_envelope(N))
        print(f"{N:10d}{r:12.5f}{e:11.5f}{r / e:9.4f}")


if __name__ == "__main__":
    main()
