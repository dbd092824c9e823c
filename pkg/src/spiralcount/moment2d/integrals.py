"""Subregion integrals A_alpha = iint_{A_alpha} alpha / y dx dy and their signed total.

Two exact evaluators are provided.

* The classical closed forms (``classical_A``), rewritten to avoid
  cancellation.  They are exact for 2c < n <= c(T^2 - 1)/T and, for A_1 and A_T,
  also for n <= 2c.
* A piecewise engine (``engine_A``) valid for every n.  In the variable
  s = xy every subregion of P_{T,c} is cut out by the curves

      c0: s = -c            c1: s = c             c2: s = n^2/(4c)
      c3: s = 0             c4: s = ny - cy^2     c6: s = (Tny - cy^2)/T^2
      c7: s = (Tny + cy^2)/T^2

  (y2 = 1 on c4, y2 or y3 = T on c6, y4 = T on c7, y2 and y3 merge on c2).
  Between consecutive crossings of these curves in y the pattern of
  subregions is fixed, so each A_alpha is a sum of one-dimensional integrals
  of known antiderivatives along the curves.

``quadrature_A`` is the independent check: adaptive 2-D quadrature of the
pointwise endpoint indicator with the same curves as splitting lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .segments import endpoint_types, y_pieces

ALPHAS = ("1", "y2", "y3", "y4", "T")
SIGN = {"1": -1, "y2": 1, "y3": -1, "y4": 1, "T": 1}


class NonElementaryError(RuntimeError):
    """Raised when a subregion boundary would need a non-elementary antiderivative."""


def band_limits(c: float, T: float) -> tuple[float, float]:
    """(c(T^2 - 1)/T, c(T^2 + 1)/T): last n with a valid A_y4, last n with any contribution."""
    return c * (T * T - 1) / T, c * (T * T + 1) / T


def n_max(c: float, T: float) -> int:
    return math.floor(c * T + c / T)


# ---------------------------------------------------------------- classical forms

def _roots(n, c):
    R = math.sqrt(n * n + 4 * c * c)
    S = math.sqrt(n * n - 4 * c * c) if n >= 2 * c else None
    return R, S


def classical_A(alpha: str, n: int, c: float, T: float) -> Optional[float]:
    """Classical closed forms, rewritten to avoid cancellation.

    Returns None where no closed form exists (A_y2, A_y3 with n < 2c).
    """
    R, S = _roots(n, c)
    Rm = 4 * c * c / (R + n)  # R - n
    small = n <= 2 * c
    if alpha in ("1", "T"):
        if small:
            return -2 * c / T + R + n * math.log(Rm / (2 * c))
        Sm = 4 * c * c / (n + S)  # n - S
        return -2 * c / T + R - S + n * math.log(Rm / Sm)
    if alpha == "y4":
        L2 = math.log(2 * c / T)
        lr = math.log(Rm)
        return ((n * lr + Rm) * math.log(T * Rm / (2 * c)) - Rm
                - 0.5 * n * lr * lr + 2 * c / T + 0.5 * n * L2 * L2)
    if small and n < 2 * c:
        return None
    Sm = 4 * c * c / (n + S)
    if alpha == "y3":
        ls = math.log(Sm)
        L2 = math.log(2 * c / T)
        return ((n * ls - Sm) * math.log(T * Sm / (2 * c)) - 0.5 * n * ls * ls
                + Sm + 0.5 * n * L2 * L2 - 2 * c / T)
    if alpha == "y2":
        lp, lq = math.log(n + R), math.log(n + S)
        coef = n * (lq - lp) + R - S
        return ((n * lq - S - n) * (lp - lq) - 0.5 * n * lp * lp + 0.5 * n * lq * lq + (R - S)
                + coef * (math.log(T) - math.log((n + R) / (2 * c))))
    raise ValueError(f"unknown subregion {alpha!r}")


def leading_term(alpha: str, n: int, c: float, T: float) -> Optional[float]:
    """Leading terms of A_y3 (n <= 2c) and A_y4; the remainders are O(log T)."""
    if alpha == "y3" and n <= 2 * c:
        return 0.5 * n * math.log(n * T / (2 * c)) ** 2
    if alpha == "y4":
        return 0.5 * n * math.log(2 * c / T) ** 2
    return None


# ---------------------------------------------------------------- piecewise engine

def _curves(n, c, T) -> dict:
    # s(y) = a0 + a1 y + a2 y^2
    return {
        "c0": (-c, 0.0, 0.0),
        "c1": (c, 0.0, 0.0),
        "c2": (n * n / (4 * c), 0.0, 0.0),
        "c3": (0.0, 0.0, 0.0),
        "c4": (0.0, float(n), -c),
        "c6": (0.0, n / T, -c / (T * T)),
        "c7": (0.0, n / T, c / (T * T)),
    }


def _poly(coef, y):
    return coef[0] + coef[1] * y + coef[2] * y * y


def _real_roots(a0, a1, a2) -> list[float]:
    if a2 == 0:
        return [-a0 / a1] if a1 != 0 else []
    disc = a1 * a1 - 4 * a2 * a0
    if disc < 0:
        return []
    r = math.sqrt(disc)
    q = -0.5 * (a1 + math.copysign(r, a1)) if a1 != 0 else -0.5 * r
    out = []
    if q != 0:
        out.append(q / a2)
        out.append(a0 / q)
    else:
        out.append(0.0)
    return out


def y_breakpoints(n: int, c: float, T: float) -> list[float]:
    """All y in (1, T) where two boundary curves cross or a branch of the antiderivatives changes."""
    curves = list(_curves(n, c, T).items())
    # c4 and c6 touch c2 tangentially; those double roots are entered exactly
    pts = {n / (2 * c), n * T / (2 * c)}
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            if {curves[i][0], curves[j][0]} in ({"c2", "c4"}, {"c2", "c6"}):
                continue
            diff = [a - b for a, b in zip(curves[i][1], curves[j][1])]
            if any(diff):
                pts.update(_real_roots(*diff))
    # near-tangential crossings come back as clusters of nearly equal roots
    merged: list[float] = []
    for p in sorted(p for p in pts if 1.0 < p < T):
        if merged and p - merged[-1] < 1e-7 * p:
            continue
        merged.append(p)
    return [p for p in merged if p < T * (1 - 1e-7) and p > 1 + 1e-7]


def _sqrt_clamped(v: float, n: int) -> float:
    # on the curve s = n^2/(4c) the radicand is zero up to rounding
    if v < 0 and v > -1e-12 * n * n:
        return 0.0
    return math.sqrt(v)


def _F(alpha: str, n: int, c: float, s: float) -> float:
    """Antiderivative in s of alpha/y, written as a function of s = xy."""
    if alpha == "y2":
        w = _sqrt_clamped(n * n - 4 * c * s, n)
        return n * math.log(n + w) - w
    if alpha == "y3":
        w = _sqrt_clamped(n * n - 4 * c * s, n)
        return n * math.log(n - w) + w
    if alpha == "y4":
        w = _sqrt_clamped(n * n + 4 * c * s, n)
        return n * math.log(w - n) + w
    raise ValueError(alpha)


def _along(alpha: str, cid: str, coef, n: int, c: float, T: float, ya: float, yb: float) -> float:
    """int_{ya}^{yb} of the inner antiderivative evaluated on curve ``cid``."""
    if alpha in ("1", "T"):
        scale = 1.0 if alpha == "1" else T
        a0, a1, a2 = coef
        G = lambda y: -a0 / y + a1 * math.log(y) + a2 * y
        return scale * (G(yb) - G(ya))
    if coef[1] == 0 and coef[2] == 0:
        try:
            return _F(alpha, n, c, coef[0]) * (math.log(yb) - math.log(ya))
        except ValueError as exc:
            raise NonElementaryError(f"{alpha} on {cid}: {exc}") from None
    ym = 0.5 * (ya + yb)
    if cid == "c4" and ((alpha == "y2" and 2 * c * ym > n) or (alpha == "y3" and 2 * c * ym < n)):
        k, lin = n * math.log(2 * c) + n, -2 * c
    elif cid == "c6" and ((alpha == "y2" and 2 * c * ym > n * T) or (alpha == "y3" and 2 * c * ym < n * T)):
        k, lin = n * math.log(2 * c / T) + n, -2 * c / T
    elif cid == "c7" and alpha == "y4":
        k, lin = n * math.log(2 * c / T) + n, 2 * c / T
    else:
        raise NonElementaryError(f"{alpha} bounded by {cid} near y = {ym}")
    G = lambda y: k * math.log(y) + 0.5 * n * math.log(y) ** 2 + lin * y
    return G(yb) - G(ya)


def _runs(n, c, T, ym, curves) -> dict:
    """For one y, the s-intervals (as pairs of curve ids) making up each A_alpha."""
    vals = sorted(((_poly(coef, ym), cid) for cid, coef in curves.items()
                   if -c <= _poly(coef, ym) <= c), key=lambda t: t[0])
    dedup = [vals[0]]
    for v in vals[1:]:
        if v[0] - dedup[-1][0] > 1e-13 * max(1.0, abs(v[0])):
            dedup.append(v)
    runs = {a: [] for a in ALPHAS}
    for (s0, id0), (s1, id1) in zip(dedup[:-1], dedup[1:]):
        types = endpoint_types(n, 0.5 * (s0 + s1) / ym, ym, T, c)
        for a in types:
            lst = runs[a]
            if lst and lst[-1][1] == id0:
                lst[-1] = (lst[-1][0], id1)
            else:
                lst.append((id0, id1))
    return runs


def engine_A(n: int, c: float, T: float) -> dict:
    """All five A_alpha for one n by exact piecewise antiderivatives."""
    if n < 1:
        raise ValueError("n must be >= 1")
    curves = _curves(n, c, T)
    ys = [1.0] + y_breakpoints(n, c, T) + [T]
    out = {a: 0.0 for a in ALPHAS}
    for ya, yb in zip(ys[:-1], ys[1:]):
        if yb - ya <= 1e-14 * yb:
            continue
        runs = _runs(n, c, T, 0.5 * (ya + yb), curves)
        for a, lst in runs.items():
            for lo, hi in lst:
                out[a] += (_along(a, hi, curves[hi], n, c, T, ya, yb)
                           - _along(a, lo, curves[lo], n, c, T, ya, yb))
    return out


# ---------------------------------------------------------------- quadrature oracle

def _x_splits(n, y, c, T) -> list[float]:
    lo, hi = -c / y, c / y
    cands = [coef for cid, coef in _curves(n, c, T).items() if cid not in ("c0", "c1")]
    xs = sorted(_poly(coef, y) / y for coef in cands)
    return [lo] + [x for x in xs if lo < x < hi] + [hi]


def _pointwise(alpha: Optional[str], n, x, y, T, c) -> float:
    total = 0.0
    for L, H, left, right in y_pieces(n, x, y, T, c):
        if alpha is None:
            total += H - L
        else:
            if left == alpha:
                total += L
            if right == alpha:
                total += H
    return total / y


def _quad2(alpha, n, c, T, tol):
    def inner(y):
        xs = _x_splits(n, y, c, T)
        return sum(quad(lambda x: _pointwise(alpha, n, x, y, T, c), a, b,
                        epsabs=tol, epsrel=tol, limit=200)[0]
                   for a, b in zip(xs[:-1], xs[1:]) if b > a)
    pts = y_breakpoints(n, c, T)
    return quad(inner, 1.0, T, points=pts or None, epsabs=tol, epsrel=tol, limit=500)[0]


def quadrature_A(alpha: str, n: int, c: float, T: float, tol: float = 1e-8) -> float:
    """Adaptive 2-D quadrature of alpha/y over A_alpha."""
    if alpha not in ALPHAS:
        raise ValueError(f"unknown subregion {alpha!r}")
    return _quad2(alpha, n, c, T, tol)


def quadrature_full_integral(n: int, c: float, T: float, tol: float = 1e-8) -> float:
    """iint_{P_{T,c}} |I^n_{(x,y)}| dx dy by quadrature of the segment length itself."""
    return _quad2(None, abs(n), c, T, tol)


# ---------------------------------------------------------------- public API

@dataclass(frozen=True)
class SubregionIntegral:
    alpha: str
    value: float
    valid: bool
    classical: Optional[float]
    source: str


def _classical_is_exact(alpha: str, n: int, c: float, T: float) -> bool:
    upper, _ = band_limits(c, T)
    if n > upper:
        return False
    if n > 2 * c:
        return True
    return alpha in ("1", "T")


def closed_form_A(alpha: str, n: int, c: float, T: float, method: str = "auto") -> SubregionIntegral:
    """Value of iint_{A_alpha} alpha/y for the line family n.

    ``valid`` marks the ranges of the closed forms: n <= c(T^2+1)/T, and for A_y4
    n <= c(T^2-1)/T.  Outside its range A_y4 is exactly zero (the region is
    empty) while the classical formula is not; the latter is kept in
    ``classical`` and is the epsilon_y4 correction.
    """
    if alpha not in ALPHAS:
        raise ValueError(f"unknown subregion {alpha!r}")
    if n < 1 or not c > 0 or not T > 1:
        raise ValueError("need n >= 1, c > 0, T > 1")
    upper, top = band_limits(c, T)
    valid = n <= top and (alpha != "y4" or n <= upper)
    classical = classical_A(alpha, n, c, T)
    if n > top:
        return SubregionIntegral(alpha, 0.0, False, classical, "empty")
    if method == "classical":
        if classical is None:
            raise ValueError(f"no classical closed form for A_{alpha} at n={n}, c={c}")
        return SubregionIntegral(alpha, classical, valid, classical, "classical")
    if method == "auto" and _classical_is_exact(alpha, n, c, T):
        return SubregionIntegral(alpha, classical, valid, classical, "classical")
    if method not in ("auto", "engine"):
        raise ValueError(f"unknown method {method!r}")
    return SubregionIntegral(alpha, engine_A(n, c, T)[alpha], valid, classical, "engine")


@dataclass
class IntegralBreakdown:
    n: int
    c: float
    T: float
    parts: dict
    total: float
    eps_y4: float = 0.0
    valid: dict = field(default_factory=dict)
    sources: dict = field(default_factory=dict)

    def signed_sum(self) -> float:
        return sum(SIGN[a] * self.parts[a] for a in ALPHAS)

    def to_dict(self) -> dict:
        return {"n": self.n, "parts": dict(self.parts), "total": self.total, "eps_y4": self.eps_y4,
                "valid": dict(self.valid), "sources": dict(self.sources)}


def full_integral(n: int, c: float, T: float, method: str = "auto") -> IntegralBreakdown:
    """A_T + A_y4 - A_y3 + A_y2 - A_1 for one n, equal to iint |I^n| over P_{T,c}."""
    if not 1 <= n <= n_max(c, T):
        raise ValueError(f"n = {n} outside 1..floor(cT + c/T) = {n_max(c, T)}")
    upper, _ = band_limits(c, T)
    need_engine = method == "engine" or (method == "auto" and (n <= 2 * c or n > upper))
    eng = engine_A(n, c, T) if need_engine else None
    parts, valid, sources = {}, {}, {}
    eps = 0.0
    for a in ALPHAS:
        classical = classical_A(a, n, c, T)
        if method != "engine" and method != "classical" and _classical_is_exact(a, n, c, T):
            parts[a], sources[a] = classical, "classical"
        elif method == "classical":
            if classical is None:
                raise ValueError(f"no classical closed form for A_{a} at n={n}")
            parts[a], sources[a] = classical, "classical"
        else:
            parts[a], sources[a] = eng[a], "engine"
        valid[a] = a != "y4" or n <= upper
    if n > upper:
        # the y4 region is empty here; record what the classical formula would have added
        eps = classical_A("y4", n, c, T)
        if method == "classical":
            parts["y4"] = 0.0
    bd = IntegralBreakdown(n, c, T, parts, 0.0, eps, valid, sources)
    bd.total = bd.signed_sum()
    return bd
