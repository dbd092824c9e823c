"""The second moment of the primitive Siegel transform of P_{T,c} in dimension 2."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..numtheory import abel_summation, totient_sieve, zeta
from .integrals import IntegralBreakdown, full_integral, n_max, quadrature_full_integral

LOG_SQUARED_NOTE = ("centering subtracts (area/zeta(2))^2 = 4c^2 log^2 T / zeta(2)^2; "
                    "a single power of log T would not cancel the leading growth")


class QuadratureMismatch(AssertionError):
    pass


@dataclass
class KYResult:
    c: float
    T: float
    value: float
    area: float
    breakdowns: list = field(default_factory=list)
    eps_y4: float = 0.0
    quadrature_value: float | None = None

    @property
    def centered(self) -> float:
        return self.value - (self.area / zeta(2.0)) ** 2

    def to_dict(self) -> dict:
        out = {
            "c": self.c, "T": self.T, "ky_second_norm": self.value, "area": self.area,
            "centered_second_moment": self.centered,
            "centered_over_logT": self.centered / math.log(self.T),
            "eps_y4": self.eps_y4, "note": LOG_SQUARED_NOTE,
            "per_n": [b.to_dict() for b in self.breakdowns],
        }
        if self.quadrature_value is not None:
            out["quadrature_value"] = self.quadrature_value
        return out


def ky_report(c: float, T: float, quadrature_check: bool = False, method: str = "auto") -> KYResult:
    """(area + 2 sum_n phi(n)/n iint |I^n|) / zeta(2), with every per-n breakdown kept.

    The overlap of P_{T,c} with its negative is empty, so no extra term appears.
    """
    if not c > 0 or not T >= 1:
        raise ValueError("need c > 0 and T >= 1")
    area = 2 * c * math.log(T)
    if T == 1:
        return KYResult(c, T, 0.0, 0.0)
    N = n_max(c, T)
    phi = totient_sieve(N)
    bds = [full_integral(n, c, T, method) for n in range(1, N + 1)]
    terms = [phi[b.n] / b.n * b.total for b in bds]
    value = (area + 2 * math.fsum(terms)) / zeta(2.0)
    eps = math.fsum(b.eps_y4 for b in bds)
    res = KYResult(c, T, value, area, bds, eps)
    if quadrature_check:
        q_terms = [phi[n] / n * quadrature_full_integral(n, c, T) for n in range(1, N + 1)]
        res.quadrature_value = (area + 2 * math.fsum(q_terms)) / zeta(2.0)
        if abs(res.quadrature_value - value) > 1e-4 * abs(value):
            raise QuadratureMismatch(f"closed form {value} vs quadrature {res.quadrature_value}")
    return res


def ky_second_norm(c: float, T: float, quadrature_check: bool = False) -> float:
    return ky_report(c, T, quadrature_check).value


def centered_second_moment(c: float, T: float) -> float:
    """ky_second_norm minus the squared primitive mean (2c log T / zeta(2))^2."""
    return ky_report(c, T).centered


class PhiSum(NamedTuple):
    direct: float
    abel: float
    leading: float


def phi_weighted_sum(c: float, T: float) -> PhiSum:
    """sum_{ceil(2c) <= n <= cT + c/T} (phi(n)/n) (4c^2/n) log(T/n), two ways, plus 2c^2 log^2 T / zeta(2)."""
    if not T > 2 * c + 1:
        raise ValueError("need T > 2c + 1")
    lo = math.ceil(2 * c)
    x = c * T + c / T
    hi = math.floor(x)
    phi = totient_sieve(hi)
    ns = np.arange(lo, hi + 1)
    a = phi[lo:] / ns
    f = lambda t: 4 * c * c / t * math.log(T / t)
    direct = math.fsum((a * 4 * c * c / ns * np.log(T / ns)).tolist())
    abel = abel_summation(a, f, hi, start=lo)
    leading = 4 * c * c / (2 * zeta(2.0)) * math.log(T) ** 2
    return PhiSum(direct, abel, leading)
