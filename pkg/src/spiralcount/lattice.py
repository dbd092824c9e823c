"""Unimodular lattices, diagonal flows and exact point enumeration in cusp regions.

Enumeration works box by box: each region is covered by dyadic slabs, every
slab box is rescaled to the cube [-1, 1]^d, the rescaled basis is reduced, and
a Fincke-Pohst search over the circumscribed ball lists the candidates.  The
exact membership predicate of the region makes the final call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .geometry import PRegion, RRegion

_BOX_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class LatticeBasis:
    """Columns generate the lattice; ``shift`` makes it affine (Lambda + xi).

    ``transform`` is the integer matrix taking coefficients in this basis to
    coefficients in the basis the lattice was first written in.
    """

    columns: np.ndarray
    shift: Optional[np.ndarray] = None
    transform: Optional[np.ndarray] = None

    def __post_init__(self):
        B = np.array(self.columns, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("basis must be a square matrix")
        det = np.linalg.det(B)
        if not math.isfinite(det) or abs(abs(det) - 1.0) > 1e-8:
            raise ValueError(f"basis is not unimodular (det = {det})")
        object.__setattr__(self, "columns", B)
        if self.shift is not None:
            xi = np.array(self.shift, dtype=float).reshape(-1)
            if xi.shape != (B.shape[0],):
                raise ValueError("shift has the wrong dimension")
            object.__setattr__(self, "shift", xi)
        if self.transform is not None:
            object.__setattr__(self, "transform", np.array(self.transform, dtype=np.int64))

    @property
    def d(self) -> int:
        return self.columns.shape[0]

    @property
    def is_affine(self) -> bool:
        return self.shift is not None and bool(np.any(self.shift != 0))

    def point(self, coeffs) -> np.ndarray:
        v = self.columns @ np.asarray(coeffs, dtype=float)
        return v + self.shift if self.shift is not None else v


@dataclass(frozen=True)
class LatticePoint:
    coords: tuple
    coeffs: tuple
    primitive: Optional[bool]

    @property
    def v2(self) -> float:
        return self.coords[-1]


@dataclass(frozen=True)
class DiagonalFlow:
    """g_t = diag(exp(t w)).

    ``spiral``: w = (1, ..., 1, -(d-1)).  ``linear``: w = (n/m on the first m
    coordinates, -1 on the last n).
    """

    kind: str
    t: float
    d: int
    m: Optional[int] = None
    n: Optional[int] = None

    def __post_init__(self):
        if self.kind == "linear":
            if self.m is None or self.n is None or self.m + self.n != self.d:
                raise ValueError("linear flow needs m + n = d")
        elif self.kind != "spiral":
            raise ValueError(f"unknown flow kind {self.kind!r}")

    def weights(self) -> np.ndarray:
        if self.kind == "spiral":
            w = np.ones(self.d)
            w[-1] = -(self.d - 1)
            return w
        return np.concatenate([np.full(self.m, self.n / self.m), -np.ones(self.n)])

    def matrix(self) -> np.ndarray:
        return np.diag(np.exp(self.t * self.weights()))


def dani_lattice(x) -> LatticeBasis:
    """Lambda_x = {(q x - p, q)}, basis [[I, x], [0, 1]]."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = x.size + 1
    B = np.eye(d)
    B[:-1, -1] = x
    return LatticeBasis(B)


def linear_forms_lattice(M, shift=None) -> LatticeBasis:
    """Lambda_M = [[I_m, M], [0, I_n]] Z^{m+n}, optionally shifted."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    m, n = M.shape
    B = np.eye(m + n)
    B[:m, m:] = M
    return LatticeBasis(B, shift=shift)


def apply_flow(flow: DiagonalFlow, basis: LatticeBasis) -> LatticeBasis:
    """Basis of g_t Lambda; coefficients are preserved point by point."""
    if flow.d != basis.d:
        raise ValueError("flow and lattice dimensions differ")
    g = np.exp(flow.t * flow.weights())
    shift = None if basis.shift is None else g * basis.shift
    return LatticeBasis(g[:, None] * basis.columns, shift, basis.transform)


# ---------------------------------------------------------------- reduction

def _lagrange(u0, u1, w0, w1):
    """Gauss-Lagrange reduction of two plane vectors, tracking the change of basis."""
    U = [1, 0, 0, 1]  # column-major: u = U[0] b0 + U[1] b1, w = U[2] b0 + U[3] b1
    nu = u0 * u0 + u1 * u1
    nw = w0 * w0 + w1 * w1
    if nw < nu:
        u0, u1, w0, w1, nu, nw = w0, w1, u0, u1, nw, nu
        U = [U[2], U[3], U[0], U[1]]
    while True:
        mu = round((u0 * w0 + u1 * w1) / nu)
        if mu:
            w0 -= mu * u0
            w1 -= mu * u1
            U[2] -= mu * U[0]
            U[3] -= mu * U[1]
            nw = w0 * w0 + w1 * w1
        if nw >= nu:
            return u0, u1, w0, w1, U
        u0, u1, w0, w1, nu, nw = w0, w1, u0, u1, nw, nu
        U = [U[2], U[3], U[0], U[1]]


def lll_reduce(B: np.ndarray, delta: float = 0.99) -> tuple[np.ndarray, np.ndarray]:
    """LLL on the columns of B.  Returns (B U, U) with U unimodular."""
    B = np.array(B, dtype=float)
    d = B.shape[1]
    U = np.eye(d, dtype=np.int64)
    if d == 1:
        return B, U
    if d == 2:
        u0, u1, w0, w1, T = _lagrange(B[0, 0], B[1, 0], B[0, 1], B[1, 1])
        return np.array([[u0, w0], [u1, w1]]), np.array([[T[0], T[2]], [T[1], T[3]]], dtype=np.int64)

    def gso(B):
        Bs = np.zeros_like(B)
        mu = np.zeros((d, d))
        for i in range(d):
            v = B[:, i].copy()
            for j in range(i):
                mu[i, j] = B[:, i] @ Bs[:, j] / (Bs[:, j] @ Bs[:, j])
                v -= mu[i, j] * Bs[:, j]
            Bs[:, i] = v
        return Bs, mu

    Bs, mu = gso(B)
    k = 1
    guard = 0
    while k < d:
        guard += 1
        if guard > 100000:
            raise RuntimeError("LLL failed to converge")
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                B[:, k] -= q * B[:, j]
                U[:, k] -= q * U[:, j]
                Bs, mu = gso(B)
        nk = Bs[:, k] @ Bs[:, k]
        nk1 = Bs[:, k - 1] @ Bs[:, k - 1]
        if nk >= (delta - mu[k, k - 1] ** 2) * nk1:
            k += 1
        else:
            B[:, [k - 1, k]] = B[:, [k, k - 1]]
            U[:, [k - 1, k]] = U[:, [k, k - 1]]
            Bs, mu = gso(B)
            k = max(k - 1, 1)
    return B, U


def reduce_basis(basis: LatticeBasis) -> LatticeBasis:
    """LLL-reduced basis of the same lattice (Lagrange in the plane)."""
    B, U = lll_reduce(basis.columns)
    prior = basis.transform if basis.transform is not None else np.eye(basis.d, dtype=np.int64)
    return LatticeBasis(B, basis.shift, prior @ U)


# ---------------------------------------------------------------- box search

def _box_coeffs_2d(B, shift, lo, hi) -> list:
    h0 = (hi[0] - lo[0]) / 2 * (1 + _BOX_SLACK)
    h1 = (hi[1] - lo[1]) / 2 * (1 + _BOX_SLACK)
    m0 = (hi[0] + lo[0]) / 2 - shift[0]
    m1 = (hi[1] + lo[1]) / 2 - shift[1]
    b00, b01, b10, b11 = B[0][0] / h0, B[0][1] / h0, B[1][0] / h1, B[1][1] / h1
    t0, t1 = m0 / h0, m1 / h1
    u0, u1, w0, w1, U = _lagrange(b00, b10, b01, b11)
    nu = u0 * u0 + u1 * u1
    mu = (u0 * w0 + u1 * w1) / nu
    s0, s1 = w0 - mu * u0, w1 - mu * u1  # Gram-Schmidt w*
    ns = s0 * s0 + s1 * s1
    tw = (t0 * s0 + t1 * s1) / ns
    tu = (t0 * u0 + t1 * u1) / nu
    r2 = 2.0 * (1 + _BOX_SLACK)
    wb = math.sqrt(r2 / ns)
    out = []
    for b in range(math.ceil(tw - wb), math.floor(tw + wb) + 1):
        rest = r2 - (b - tw) ** 2 * ns
        if rest < 0:
            continue
        wa = math.sqrt(rest / nu)
        ca = tu - b * mu
        for a in range(math.ceil(ca - wa), math.floor(ca + wa) + 1):
            x0 = a * u0 + b * w0 - t0
            x1 = a * u1 + b * w1 - t1
            if -1.0 <= x0 <= 1.0 and -1.0 <= x1 <= 1.0:
                out.append((U[0] * a + U[2] * b, U[1] * a + U[3] * b))
    return out


def _box_coeffs_nd(B, shift, lo, hi) -> list:
    d = B.shape[0]
    h = (hi - lo) / 2 * (1 + _BOX_SLACK)
    t = ((hi + lo) / 2 - shift) / h
    C = B / h[:, None]
    Cr, U = lll_reduce(C)
    Q, R = np.linalg.qr(Cr)
    y = Q.T @ t
    r2 = d * (1 + _BOX_SLACK)
    out = []
    k = [0] * d

    def search(i: int, partial: float):
        center = y[i] - sum(R[i, j] * k[j] for j in range(i + 1, d))
        rii = R[i, i]
        width = math.sqrt(max(r2 - partial, 0.0)) / abs(rii)
        mid = center / rii
        for ki in range(math.ceil(mid - width), math.floor(mid + width) + 1):
            k[i] = ki
            dist = partial + (rii * ki - center) ** 2
            if dist > r2:
                continue
            if i == 0:
                z = Cr @ np.array(k, dtype=float) - t
                if np.all(np.abs(z) <= 1.0):
                    out.append(tuple(int(v) for v in U @ np.array(k, dtype=np.int64)))
            else:
                search(i - 1, dist)

    search(d - 1, 0.0)
    return out


def _region_coeffs(basis: LatticeBasis, region) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients and coordinates of every lattice point in ``region``, sorted."""
    if not isinstance(region, (PRegion, RRegion)):
        raise TypeError("enumeration needs a bounded PRegion or RRegion")
    if region.d != basis.d:
        raise ValueError("region and lattice dimensions differ")
    B = basis.columns
    shift = basis.shift if basis.shift is not None else np.zeros(basis.d)
    found = []
    if basis.d == 2:
        Bl = B.tolist()
        sl = shift.tolist()
        for lo, hi in region.boxes():
            found.extend(_box_coeffs_2d(Bl, sl, lo.tolist(), hi.tolist()))
    else:
        for lo, hi in region.boxes():
            found.extend(_box_coeffs_nd(B, shift, lo, hi))
    if not found:
        return np.zeros((0, basis.d), dtype=np.int64), np.zeros((0, basis.d))
    K = np.unique(np.array(found, dtype=np.int64), axis=0)
    V = K @ B.T + shift
    keep = region.contains(V)
    K, V = K[keep], V[keep]
    if basis.transform is not None:
        K = K @ basis.transform.T
    return K, V


def is_primitive(k) -> bool:
    """gcd of the absolute coefficients is 1."""
    k = np.asarray(k, dtype=np.int64).reshape(-1)
    if not np.any(k):
        raise ValueError("the zero vector is not primitive or imprimitive")
    return int(np.gcd.reduce(np.abs(k))) == 1


def box_points(basis: LatticeBasis, lo, hi) -> np.ndarray:
    """Coordinates of all points of the (affine) lattice in the box [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    B = basis.columns
    shift = basis.shift if basis.shift is not None else np.zeros(basis.d)
    if basis.d == 2:
        found = _box_coeffs_2d(B.tolist(), shift.tolist(), lo.tolist(), hi.tolist())
    else:
        found = _box_coeffs_nd(B, shift, lo, hi)
    if not found:
        return np.zeros((0, basis.d))
    V = np.unique(np.array(found, dtype=np.int64), axis=0) @ B.T + shift
    return V[np.all((V >= lo) & (V <= hi), axis=1)]


def _primitive_mask(K: np.ndarray, affine: bool) -> np.ndarray:
    if affine:
        return np.ones(len(K), dtype=bool)
    return np.gcd.reduce(np.abs(K), axis=1) == 1 if len(K) else np.zeros(0, dtype=bool)


def enumerate_points(basis: LatticeBasis, region, primitive_only: bool = False) -> list[LatticePoint]:
    """All points of the (affine) lattice inside ``region``, ordered by coefficients.

    Primitivity is gcd of the integer coefficients; for an affine lattice it
    has no meaning, so ``primitive`` is None and ``primitive_only`` is refused.
    """
    if primitive_only and basis.is_affine:
        raise ValueError("primitive vectors are not defined for affine lattices")
    K, V = _region_coeffs(basis, region)
    prim = None if basis.is_affine else _primitive_mask(K, False)
    pts = []
    for i in range(len(K)):
        p = None if prim is None else bool(prim[i])
        if primitive_only and not p:
            continue
        pts.append(LatticePoint(tuple(V[i].tolist()), tuple(int(a) for a in K[i]), p))
    return pts


def count_points(basis: LatticeBasis, region, primitive_only: bool = False) -> int:
    if primitive_only and basis.is_affine:
        raise ValueError("primitive vectors are not defined for affine lattices")
    K, _ = _region_coeffs(basis, region)
    return int(_primitive_mask(K, False).sum()) if primitive_only else len(K)


def count_both(basis: LatticeBasis, region) -> tuple[int, int]:
    """(all points, primitive points) from a single enumeration."""
    K, _ = _region_coeffs(basis, region)
    return len(K), int(_primitive_mask(K, False).sum())


class SlabIdentity(NamedTuple):
    per_slab: list
    total: int

    @property
    def holds(self) -> bool:
        return sum(self.per_slab) == self.total


def slab_count_identity(basis: LatticeBasis, T: float, c: float, N: int,
                        primitive_only: bool = False) -> SlabIdentity:
    """Counts in g_s^k Lambda for k < N next to the direct count in P_{T^N, c}, with s = log T / (d-1)."""
    d = basis.d
    s = math.log(T) / (d - 1)
    region = PRegion(d, T=T, c=c)
    per = []
    for k in range(N):
        flowed = apply_flow(DiagonalFlow("spiral", k * s, d), basis)
        per.append(count_points(flowed, region, primitive_only))
    total = count_points(basis, PRegion(d, T=T ** N, c=c), primitive_only)
    return SlabIdentity(per, total)
