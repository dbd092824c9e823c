"""Cusp-shaped regions P_{T,c}, R_{T,c}, spherical caps and their volumes."""

from __future__ import annotations

import math
from dataclasses import KW_ONLY, dataclass
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.special import betainc

# relative slack used by every membership predicate (non-strict convention)
REL_TOL = 1e-12


def unit_ball_volume(k: int) -> float:
    """Lebesgue volume B_k of the unit ball in R^k (B_0 = 1)."""
    if k < 0:
        raise ValueError("dimension must be non-negative")
    # B_k = (2 pi / k) B_{k-2} keeps B_1 = 2 and B_2 = pi exact
    v = 1.0 if k % 2 == 0 else 2.0
    for j in range(2 + k % 2, k + 1, 2):
        v *= 2 * math.pi / j
    return v


def unit_sphere_area(n: int) -> float:
    """Surface measure C_n of S^{n-1} in R^n; C_1 = 2 counts the two points {-1, 1}."""
    if n < 1:
        raise ValueError("need n >= 1")
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def direction(err) -> np.ndarray:
    """Unit vector err/||err||.  A one-dimensional input gives its sign."""
    v = np.atleast_1d(np.asarray(err, dtype=float))
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("direction of the zero vector is undefined")
    return v / norm


@dataclass(frozen=True)
class SphericalCap:
    """Closed cap {u : angle(u, axis) <= angle} on S^{d_sphere}.

    On S^0 = {-1, +1} use :meth:`points`; there the "cap" is a subset.
    """

    d_sphere: int
    axis: tuple = ()
    angle: float = 0.0
    subset: Optional[frozenset] = None

    def __post_init__(self):
        if self.d_sphere < 0:
            raise ValueError("d_sphere must be >= 0")
        if self.d_sphere == 0:
            if self.subset is None:
                raise ValueError("caps on S^0 are given as subsets; use SphericalCap.points")
            if not set(self.subset) <= {-1, 1}:
                raise ValueError("S^0 subsets may only contain -1 and +1")
            return
        ax = np.asarray(self.axis, dtype=float)
        if ax.shape != (self.d_sphere + 1,):
            raise ValueError(f"axis must have length {self.d_sphere + 1}")
        if not 0.0 <= self.angle <= math.pi:
            raise ValueError("angle must lie in [0, pi]")
        object.__setattr__(self, "axis", tuple(ax / np.linalg.norm(ax)))

    @classmethod
    def points(cls, subset: Sequence[int]) -> "SphericalCap":
        return cls(0, subset=frozenset(int(s) for s in subset))

    @classmethod
    def hemisphere(cls, axis) -> "SphericalCap":
        ax = tuple(float(a) for a in np.atleast_1d(axis))
        if len(ax) == 1:
            return cls.points([1 if ax[0] > 0 else -1])
        return cls(len(ax) - 1, ax, math.pi / 2)

    def complement(self) -> "SphericalCap":
        # boundary has measure zero, so the reflected cap is a complement
        if self.d_sphere == 0:
            return SphericalCap.points({-1, 1} - set(self.subset))
        return SphericalCap(self.d_sphere, tuple(-a for a in self.axis), math.pi - self.angle)

    def contains(self, u) -> np.ndarray:
        """Membership for unit vectors; ``u`` has shape (..., d_sphere + 1)."""
        u = np.asarray(u, dtype=float)
        if self.d_sphere == 0:
            s = np.sign(u[..., 0])
            return np.isin(s, list(self.subset))
        cosang = u @ np.asarray(self.axis)
        return cosang >= math.cos(self.angle) - 1e-12

    def to_dict(self) -> dict:
        if self.d_sphere == 0:
            return {"d_sphere": 0, "subset": sorted(self.subset)}
        return {"d_sphere": self.d_sphere, "axis": list(self.axis), "angle": self.angle}

    @classmethod
    def from_dict(cls, data: dict) -> "SphericalCap":
        if data["d_sphere"] == 0:
            return cls.points(data["subset"])
        return cls(int(data["d_sphere"]), tuple(data["axis"]), float(data["angle"]))


def cap_measure(cap: SphericalCap) -> float:
    """Normalised surface measure of the cap."""
    if cap.d_sphere == 0:
        return len(cap.subset) / 2
    k, theta = cap.d_sphere, cap.angle
    if theta <= math.pi / 2:
        return 0.5 * float(betainc(k / 2, 0.5, math.sin(theta) ** 2))
    return 1.0 - 0.5 * float(betainc(k / 2, 0.5, math.sin(theta) ** 2))


def _geometric_cuts(lo: float, hi: float, ratio: float = 2.0) -> list[float]:
    if hi <= lo:
        return []
    cuts = [lo]
    while cuts[-1] * ratio < hi:
        cuts.append(cuts[-1] * ratio)
    cuts.append(hi)
    return cuts


@dataclass(frozen=True)
class PRegion:
    """P_{T,c} = {(v1, v2) : ||v1||^(d-1) v2 <= c, 1 < v2 <= T}, optionally cut by a cap on v1/||v1||."""

    d: int
    _: KW_ONLY
    T: float
    c: float
    cap: Optional[SphericalCap] = None

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("need d >= 2")
        if not self.T >= 1:
            raise ValueError("need T >= 1 (T = 1 is the empty region)")
        if not self.c > 0:
            raise ValueError("need c > 0")
        if self.cap is not None and self.cap.d_sphere != self.d - 2:
            raise ValueError(f"cap must live on S^{self.d - 2}")

    @property
    def norm_exponent(self) -> int:
        return self.d - 1

    def contains(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        v1, v2 = v[..., :-1], v[..., -1]
        r = np.linalg.norm(v1, axis=-1)
        ok = (v2 > 1.0 + REL_TOL) & (v2 <= self.T * (1 + REL_TOL))
        ok &= r ** (self.d - 1) * v2 <= self.c * (1 + REL_TOL)
        if self.cap is not None:
            safe = np.where(r[..., None] > 0, v1 / np.where(r > 0, r, 1.0)[..., None], 0.0)
            ok &= (r > 0) & self.cap.contains(safe)
        return ok

    def volume(self) -> float:
        vol = self.c * unit_ball_volume(self.d - 1) * math.log(self.T)
        return vol * cap_measure(self.cap) if self.cap is not None else vol

    def boxes(self, ratio: float = 2.0) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Axis-parallel boxes whose union covers the region (dyadic slabs in v2)."""
        cuts = _geometric_cuts(1.0, self.T, ratio)
        for a, b in zip(cuts[:-1], cuts[1:]):
            w = (self.c / a) ** (1.0 / (self.d - 1))
            lo = np.full(self.d, -w)
            hi = np.full(self.d, w)
            lo[-1], hi[-1] = a, b
            yield lo, hi

    def with_T(self, T: float) -> "PRegion":
        return PRegion(self.d, T=T, c=self.c, cap=self.cap)

    def to_dict(self) -> dict:
        out = {"kind": "P", "d": self.d, "T": self.T, "c": self.c}
        if self.cap is not None:
            out["cap"] = self.cap.to_dict()
        return out


@dataclass(frozen=True)
class RRegion:
    """R_{T,c} = {(x, y) in R^m x R^n : ||x||^m ||y||^n <= c, 1 <= ||y|| < T}."""

    m: int
    n: int
    _: KW_ONLY
    T: float
    c: float

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("need m, n >= 1")
        if not self.T >= 1:
            raise ValueError("need T >= 1 (T = 1 is the empty region)")
        if not self.c > 0:
            raise ValueError("need c > 0")

    @property
    def d(self) -> int:
        return self.m + self.n

    def contains(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        rx = np.linalg.norm(v[..., : self.m], axis=-1)
        ry = np.linalg.norm(v[..., self.m :], axis=-1)
        ok = (ry >= 1.0 - REL_TOL) & (ry < self.T * (1 - REL_TOL))
        return ok & (rx ** self.m * ry ** self.n <= self.c * (1 + REL_TOL))

    def volume(self) -> float:
        return self.c * unit_ball_volume(self.m) * unit_sphere_area(self.n) * math.log(self.T)

    def boxes(self, ratio: float = 2.0) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        cuts = _geometric_cuts(1.0, self.T, ratio)
        for a, b in zip(cuts[:-1], cuts[1:]):
            w = (self.c / a ** self.n) ** (1.0 / self.m)
            lo = np.concatenate([np.full(self.m, -w), np.full(self.n, -b)])
            hi = np.concatenate([np.full(self.m, w), np.full(self.n, b)])
            if self.n == 1:
                # split the shell |y| in [a, b) into its two halves
                lo_pos, hi_neg = lo.copy(), hi.copy()
                lo_pos[-1] = a
                hi_neg[-1] = -a
                yield lo_pos, hi
                yield lo, hi_neg
            else:
                yield lo, hi

    def with_T(self, T: float) -> "RRegion":
        return RRegion(self.m, self.n, T=T, c=self.c)

    def to_dict(self) -> dict:
        return {"kind": "R", "m": self.m, "n": self.n, "T": self.T, "c": self.c}


def region_from_dict(data: dict):
    kind = data.get("kind", "P")
    if kind == "P":
        cap = SphericalCap.from_dict(data["cap"]) if data.get("cap") else None
        return PRegion(int(data["d"]), T=float(data["T"]), c=float(data["c"]), cap=cap)
    if kind == "R":
        return RRegion(int(data["m"]), int(data["n"]), T=float(data["T"]), c=float(data["c"]))
    raise ValueError(f"unknown region kind {kind!r}")


def p_region_volume(r: PRegion) -> float:
    """c B_{d-1} log T, times the cap measure when a cap is attached."""
    return r.volume()


def r_region_volume(r: RRegion) -> float:
    """c B_m C_n log T."""
    return r.volume()


def symmetric_overlap_volume(r) -> float:
    """Volume of r intersected with -r.  Zero for P-regions, whose last coordinate exceeds 1."""
    if isinstance(r, PRegion):
        return 0.0
    raise NotImplementedError("only P-regions are supported")
