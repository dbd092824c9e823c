"""Intersections of the lines L(n, x, y) with P_{T,c} in the plane.

Writing Y for the second coordinate along the line, the first coordinate is
(xY - n)/y and the parameter t moves at speed y in Y.  The line meets
P_{T,c} exactly where |xY - n| Y <= c y and 1 < Y <= T, so every length
below is a Y-length divided by y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from ..geometry import REL_TOL

# endpoint labels: left ends are "1" or "y3", right ends "y2", "y4" or "T"
CASES = {
    frozenset({"1", "T"}): 1,
    frozenset({"1", "y2"}): 2,
    frozenset({"1", "y4"}): 3,
    frozenset({"y3", "T"}): 4,
    frozenset({"y3", "y4"}): 5,
    frozenset({"1", "y2", "y3", "y4"}): 6,
    frozenset({"1", "y2", "y3", "T"}): 7,
    frozenset(): 8,
}


@dataclass(frozen=True)
class SegmentQuery:
    n: int
    x: float
    y: float
    T: float
    c: float

    def __post_init__(self):
        if self.n == 0 or int(self.n) != self.n:
            raise ValueError("n must be a nonzero integer")
        if not (self.T > 1 and self.c > 0):
            raise ValueError("need T > 1 and c > 0")
        if not (1 < self.y <= self.T * (1 + REL_TOL)) or abs(self.x) * self.y > self.c * (1 + REL_TOL):
            raise ValueError(f"({self.x}, {self.y}) is not in P_(T,c)")


class RootsY(NamedTuple):
    y1: Optional[float]
    y2: Optional[float]
    y3: Optional[float]
    y4: Optional[float]


@dataclass(frozen=True)
class IntersectionProfile:
    case_id: int
    roots: tuple
    hits_floor: bool
    hits_ceiling: bool


def roots_y(n: int, x: float, y: float, c: float) -> RootsY:
    """Second coordinates where L(n, x, y) meets the hyperbolas |XY| = c.

    Rationalised forms keep y1, y2 accurate for small |x| and give the
    x = 0 values -cy/n and cy/n directly; y3 and y4 do not exist at x = 0.
    """
    cy = c * y
    d_plus = n * n + 4 * x * cy
    d_minus = n * n - 4 * x * cy
    y1 = y4 = y2 = y3 = None
    if d_plus >= 0:
        r = math.sqrt(d_plus)
        if n + r != 0:
            y1 = -2 * cy / (n + r)
        if x != 0:
            y4 = (n + r) / (2 * x)
    if d_minus >= 0:
        r = math.sqrt(d_minus)
        if n + r != 0:
            y2 = 2 * cy / (n + r)
        if x != 0:
            y3 = (n + r) / (2 * x)
    return RootsY(y1, y2, y3, y4)


def y_pieces(n: int, x: float, y: float, T: float, c: float) -> list[tuple[float, float, str, str]]:
    """The set {Y in (1, T] : |xY - n| Y <= cy} for n > 0 as labelled intervals (L, H, left, right)."""
    if n <= 0:
        raise ValueError("y_pieces expects n > 0; reflect (n, x) -> (-n, -x) first")
    cy = c * y
    if x == 0:
        raw = [(0.0, cy / n, None, "y2")]
    elif x > 0:
        rp = math.sqrt(n * n + 4 * x * cy)
        y4 = (n + rp) / (2 * x)
        disc = n * n - 4 * x * cy
        if disc > 0:
            rm = math.sqrt(disc)
            raw = [(0.0, 2 * cy / (n + rm), None, "y2"), ((n + rm) / (2 * x), y4, "y3", "y4")]
        else:
            raw = [(0.0, y4, None, "y4")]
    else:
        raw = [(0.0, 2 * cy / (n + math.sqrt(n * n - 4 * x * cy)), None, "y2")]
    out = []
    for lo, hi, left, right in raw:
        L, H = max(lo, 1.0), min(hi, T)
        if H > L:
            out.append((L, H, "1" if lo <= 1.0 else left, "T" if hi >= T else right))
    return out


def _oriented(q: SegmentQuery) -> tuple[int, float]:
    # the region is symmetric in its first coordinate, so (n, x) -> (-n, -x) is free
    return (q.n, q.x) if q.n > 0 else (-q.n, -q.x)


def segment_length(q: SegmentQuery) -> float:
    """Lebesgue measure of {t : L(n, x, y, t) in P_{T,c}}."""
    n, x = _oriented(q)
    return sum(H - L for L, H, _, _ in y_pieces(n, x, q.y, q.T, q.c)) / q.y


def endpoint_types(n: int, x: float, y: float, T: float, c: float) -> frozenset:
    return frozenset(t for L, H, a, b in y_pieces(n, x, y, T, c) for t in (a, b))


def classify_intersection(q: SegmentQuery) -> IntersectionProfile:
    n, x = _oriented(q)
    types = endpoint_types(n, x, q.y, q.T, q.c)
    try:
        case = CASES[types]
    except KeyError:  # pragma: no cover - would mean the eight cases are not exhaustive
        raise RuntimeError(f"unexpected endpoint pattern {sorted(types)}")
    roots = tuple(r for r in ("y2", "y3", "y4") if r in types)
    return IntersectionProfile(case, roots, "1" in types, "T" in types)
