"""Large-n expansions of the n > 2c summands, in powers of eps = c^2/n^2.

With R = sqrt(n^2 + 4c^2), S = sqrt(n^2 - 4c^2) and L = log(n/c):

    log(R - n) = log(2c^2/n) + P        log(n + R) = log(2n) - P
    log(n - S) = log(2c^2/n) + Q        log(n + S) = log(2n) - Q

where P = sum (-1)^k b_k eps^k, Q = sum b_k eps^k, b_k = binom(2k, k)/(2k).
Each expansion is n times a series whose coefficients are affine in L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import mpmath

EXPANSIONS = ("log_R_minus_n", "log_ratio", "sqrt_diff", "log_sq", "R_log", "S_log")
LISTED = EXPANSIONS[:4]


@dataclass(frozen=True)
class SeriesSpec:
    which: str
    n: float
    c: float
    K: int = 3

    def __post_init__(self):
        if self.which not in EXPANSIONS:
            raise ValueError(f"unknown expansion {self.which!r}; choose from {EXPANSIONS}")
        if not self.n > 2 * self.c:
            raise ValueError("the expansions need n > 2c (S is real only there)")
        if self.K < 0:
            raise ValueError("K must be >= 0")


class SeriesResult(NamedTuple):
    truncated: float
    direct: float
    abs_diff: float


def _b(k: int, one=1.0):
    return one * math.comb(2 * k, k) / (2 * k)


def _half_binom(k: int, one=1.0):
    out = one
    for i in range(k):
        out = out * (one / 2 - i) / (i + 1)
    return out


def _coeffs(which: str, c, order: int, one=1.0) -> list:
    """Rows [a_j, b_j]: the coefficient of eps^j is a_j + b_j L.

    ``one`` fixes the number type (1.0 or an mpmath mpf).
    """
    zero = one * 0
    row = lambda: [[zero, zero] for _ in range(order + 1)]
    P, Q, Rn, Sn = row(), row(), row(), row()
    for k in range(order + 1):
        if k:
            P[k][0] = (-1) ** k * _b(k, one)
            Q[k][0] = _b(k, one)
        Rn[k][0] = _half_binom(k, one) * 4 ** k
        Sn[k][0] = _half_binom(k, one) * (-4) ** k

    def add(a, b, sa=1, sb=1):
        return [[sa * x[0] + sb * y[0], sa * x[1] + sb * y[1]] for x, y in zip(a, b)]

    def mul(a, b):
        out = row()
        for i in range(order + 1):
            for j in range(order + 1 - i):
                if a[i][1] * b[j][1]:
                    raise AssertionError("series left the span of {1, L}")
                out[i + j][0] += a[i][0] * b[j][0]
                out[i + j][1] += a[i][0] * b[j][1] + a[i][1] * b[j][0]
        return out

    def const_L(a0, a1):
        r = row()
        r[0] = [one * a0, one * a1]
        return r

    log = math.log if one == 1.0 and isinstance(one, float) else mpmath.log
    if which == "log_R_minus_n":
        return add(const_L(log(2 * c), -1), P)
    if which == "log_ratio":
        return add(P, Q, 2, -2)
    if which == "sqrt_diff":
        return add(Rn, Sn, 1, -1)
    if which == "log_sq":
        return mul(add(P, Q, 1, -1), add(const_L(0, -2), add(P, Q)))
    if which == "R_log":
        return mul(Rn, add(const_L(0, -2), P, 1, 2))
    if which == "S_log":
        return mul(Sn, add(const_L(0, 2), Q, 1, -2))
    raise ValueError(which)


def series_terms(which: str, n, c, K: int, dps: Optional[int] = None) -> list:
    """The first K + 1 nonzero terms (leading term first), each c^(2j) n^(1-2j) (a_j + b_j L).

    With ``dps`` the terms are mpmath numbers carrying that many digits.
    """
    order = 2 * K + 4
    if dps is None:
        one, log = 1.0, math.log
    else:
        one, log = mpmath.mpf(1), mpmath.log
        n, c = mpmath.mpf(n), mpmath.mpf(c)
    co = _coeffs(which, c, order, one)
    L = log(n / c)
    eps = (c / n) ** 2
    tiny = 1e-15 if dps is None else mpmath.mpf(10) ** (-dps + 5)
    out = []
    for j in range(order + 1):
        a, b = co[j]
        if abs(a) < tiny and abs(b) < tiny:
            continue
        out.append(n * eps ** j * (a + b * L))
        if len(out) == K + 1:
            break
    return out


def direct_value(which: str, n: float, c: float) -> float:
    R = math.sqrt(n * n + 4 * c * c)
    S = math.sqrt(n * n - 4 * c * c)
    Rm = 4 * c * c / (R + n)  # R - n without cancellation
    Sm = 4 * c * c / (n + S)  # n - S
    if which == "log_R_minus_n":
        return n * math.log(Rm)
    # D = log((n + R)/(n + S)) = log(Sm/Rm), small for large n
    D = -math.log1p(-8 * c * c / ((R + S) * (n + R)))
    if which == "log_ratio":
        return -2 * n * D
    if which == "sqrt_diff":
        return 8 * c * c / (R + S)  # (R^2 - S^2)/(R + S)
    if which == "log_sq":
        # difference of squares pairs up into D times a sum of logs
        return 0.5 * n * D * (math.log(R + n) + math.log(n + S) - math.log(Rm) - math.log(Sm))
    if which == "R_log":
        return R * math.log(Rm / (R + n))
    if which == "S_log":
        return S * math.log((n + S) / Sm)
    raise ValueError(which)


def direct_value_mp(which: str, n, c, dps: int):
    with mpmath.workdps(dps):
        n, c = mpmath.mpf(n), mpmath.mpf(c)
        R, S = mpmath.sqrt(n * n + 4 * c * c), mpmath.sqrt(n * n - 4 * c * c)
        lg = mpmath.log
        return {
            "log_R_minus_n": lambda: n * lg(R - n),
            "log_ratio": lambda: n * (lg(R - n) + lg(n + S) - lg(n + R) - lg(n - S)),
            "sqrt_diff": lambda: R - S,
            "log_sq": lambda: n / 2 * (lg(R - n) ** 2 + lg(R + n) ** 2 - lg(n + S) ** 2 - lg(n - S) ** 2),
            "R_log": lambda: R * lg((R - n) / (R + n)),
            "S_log": lambda: S * lg((n + S) / (n - S)),
        }[which]()


def series_eval(spec: SeriesSpec, dps: Optional[int] = None) -> SeriesResult:
    """Truncation to the leading term plus K corrections, against direct evaluation.

    By default both sides are doubles. With ``dps`` both are computed in
    mpmath at that precision, so truncation errors far below double
    rounding are resolved; the fields are still returned as floats.
    """
    if dps is None:
        trunc = math.fsum(series_terms(spec.which, spec.n, spec.c, spec.K))
        direct = direct_value(spec.which, spec.n, spec.c)
        return SeriesResult(trunc, direct, abs(trunc - direct))
    with mpmath.workdps(dps):
        trunc = mpmath.fsum(series_terms(spec.which, spec.n, spec.c, spec.K, dps=dps))
        direct = direct_value_mp(spec.which, spec.n, spec.c, dps)
        return SeriesResult(float(trunc), float(direct), float(abs(trunc - direct)))
