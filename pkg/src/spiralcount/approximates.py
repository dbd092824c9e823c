"""Dirichlet-type approximates of a vector x and the directions of their errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import SphericalCap, unit_ball_volume
from .numtheory import zeta
from .experiment import ExperimentSeries


@dataclass(frozen=True)
class ApproximatePair:
    p: tuple
    q: int
    err: tuple
    err_norm: float
    dir: Optional[tuple]


def _raw_approximates(x: np.ndarray, c: float, T: float):
    """Integer arrays (P, Q) of all pairs with ||q x - p|| < c q^(-1/d), 1 <= q <= T."""
    d = x.size
    qmax = math.floor(T)
    if qmax < 1:
        return np.zeros((0, d), dtype=np.int64), np.zeros(0, dtype=np.int64)
    q_all = np.arange(1, qmax + 1, dtype=np.int64)
    radius = c * q_all.astype(float) ** (-1.0 / d)
    Ps, Qs = [], []
    # beyond q0 the radius is below 1/2 and only the rounded vector can qualify
    q0 = int(np.searchsorted(-radius, -0.5, side="left"))
    for i in range(q0):
        q, r = int(q_all[i]), radius[i]
        qx = q * x
        ranges = [range(math.ceil(v - r), math.floor(v + r) + 1) for v in qx]
        grid = np.array(np.meshgrid(*ranges, indexing="ij")).reshape(d, -1).T
        if grid.size == 0:
            continue
        err = qx - grid
        keep = np.linalg.norm(err, axis=1) < r
        Ps.append(grid[keep])
        Qs.append(np.full(int(keep.sum()), q, dtype=np.int64))
    if q0 < qmax:
        tail = q_all[q0:]
        QX = tail[:, None] * x[None, :]
        P = np.rint(QX).astype(np.int64)
        keep = np.linalg.norm(QX - P, axis=1) < radius[q0:]
        Ps.append(P[keep])
        Qs.append(tail[keep])
    if not Ps:
        return np.zeros((0, d), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(Ps), np.concatenate(Qs)


def enumerate_approximates(x, c: float, T: float, coprime: bool = False) -> list[ApproximatePair]:
    """Pairs (p, q) with 1 <= q <= T and ||q x - p|| < c q^(-1/d), sorted by q then p.

    Exact approximates (zero error) are returned with ``dir`` None.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not c > 0:
        raise ValueError("c must be positive")
    P, Q = _raw_approximates(x, c, T)
    if coprime and len(Q):
        keep = np.gcd.reduce(np.column_stack([np.abs(P), Q]), axis=1) == 1
        P, Q = P[keep], Q[keep]
    order = np.lexsort(tuple(P[:, j] for j in range(P.shape[1] - 1, -1, -1)) + (Q,))
    out = []
    for i in order:
        q = int(Q[i])
        err = q * x - P[i]
        nrm = float(np.linalg.norm(err))
        u = tuple((err / nrm).tolist()) if nrm > 0 else None
        out.append(ApproximatePair(tuple(int(a) for a in P[i]), q, tuple(err.tolist()), nrm, u))
    return out


@dataclass(frozen=True)
class SpiralCounts:
    n_total: int
    n_in_cap: int
    n_exact: int
    ratio: Optional[float]


def spiralling_counts(x, c: float, T: float, cap: SphericalCap, coprime: bool = False) -> SpiralCounts:
    """How many approximate errors point into ``cap``.

    Exact approximates have no direction and are left out of both counts.
    ``ratio`` is None when nothing is left.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if cap.d_sphere != x.size - 1:
        raise ValueError(f"cap must live on S^{x.size - 1}")
    P, Q = _raw_approximates(x, c, T)
    if coprime and len(Q):
        keep = np.gcd.reduce(np.column_stack([np.abs(P), Q]), axis=1) == 1
        P, Q = P[keep], Q[keep]
    err = Q[:, None] * x[None, :] - P
    nrm = np.linalg.norm(err, axis=1)
    live = nrm > 0
    u = err[live] / nrm[live, None]
    inside = int(cap.contains(u).sum())
    total = int(live.sum())
    return SpiralCounts(total, inside, int((~live).sum()), inside / total if total else None)


def approximate_target(d: int, c: float, T: float, coprime: bool = False) -> float:
    """Expected count c^d B_d log T, divided by zeta(d+1) for coprime pairs."""
    base = c ** d * unit_ball_volume(d) * math.log(T)
    return base / zeta(d + 1) if coprime else base


def counting_series(x, c: float, T_grid: Sequence[float], coprime: bool = False) -> ExperimentSeries:
    """Counts N(T) of approximates along a grid of T against c^d B_d log T.

    One enumeration up to max(T_grid) feeds every grid point.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    grid = sorted(float(t) for t in T_grid)
    P, Q = _raw_approximates(x, c, grid[-1])
    if coprime and len(Q):
        keep = np.gcd.reduce(np.column_stack([np.abs(P), Q]), axis=1) == 1
        P, Q = P[keep], Q[keep]
    exact = int(np.sum(np.all(Q[:, None] * x[None, :] == P, axis=1))) if len(Q) else 0
    Qs = np.sort(Q)
    counts = np.searchsorted(Qs, np.floor(grid), side="right")
    targets = [approximate_target(x.size, c, T, coprime) for T in grid]
    return ExperimentSeries.from_columns(
        grid, counts.astype(float), targets,
        meta={"experiment": "approximates", "x": x.tolist(), "c": c, "coprime": coprime,
              "degenerate": exact > 0, "exact_approximates": exact},
    )
