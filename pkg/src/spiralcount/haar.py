"""Exact Haar sampling on X_2 = SL(2,R)/SL(2,Z) and Monte Carlo moment checks."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .geometry import PRegion, symmetric_overlap_volume
from .lattice import LatticeBasis, box_points, count_both, count_points
from .numtheory import zeta
from .stats import MomentEstimate, Welford

_V_MIN = math.sqrt(3) / 2
log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HaarSample:
    u: float
    v: float
    theta: float

    @property
    def basis(self) -> LatticeBasis:
        return LatticeBasis(haar_basis(self.u, self.v, self.theta))


def haar_basis(u: float, v: float, theta: float) -> np.ndarray:
    """R(theta) (1/sqrt v) [[1, u], [0, v]]."""
    c, s = math.cos(theta), math.sin(theta)
    r = 1.0 / math.sqrt(v)
    return np.array([[c * r, (c * u - s * v) * r], [s * r, (s * u + c * v) * r]])


def sample_fundamental_domain(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """n points of {|u| <= 1/2, u^2 + v^2 >= 1} with density (3/pi) v^-2.

    v comes from the inverse CDF of v^-2 on [sqrt3/2, inf), u is uniform, and
    points under the unit circle are rejected (about 21% of proposals).
    """
    us, vs = [], []
    need = n
    proposed = accepted = 0
    while need > 0:
        m = int(need * 1.3) + 16
        v = _V_MIN / (1.0 - rng.random(m))
        u = rng.random(m) - 0.5
        ok = u * u + v * v >= 1.0
        proposed += m
        accepted += int(ok.sum())
        us.append(u[ok][:need])
        vs.append(v[ok][:need])
        need -= us[-1].size
    log.debug("fundamental domain sampler: acceptance %.4f (%d proposals)", accepted / proposed, proposed)
    return np.concatenate(us), np.concatenate(vs)


def sample_haar_batch(rng: np.random.Generator, n: int) -> list[HaarSample]:
    u, v = sample_fundamental_domain(rng, n)
    theta = rng.random(n) * 2 * math.pi
    return [HaarSample(float(a), float(b), float(t)) for a, b, t in zip(u, v, theta)]


def sample_haar_x2(rng: np.random.Generator) -> HaarSample:
    return sample_haar_batch(rng, 1)[0]


def v_marginal_cdf(v) -> np.ndarray:
    """CDF of the v-coordinate under the normalised hyperbolic measure on the fundamental domain."""
    v = np.asarray(v, dtype=float)

    def G(t):  # antiderivative of (1 - 2 sqrt(1 - t^2)) / t^2
        t = np.clip(t, _V_MIN, 1.0)
        return -1.0 / t + 2.0 * np.sqrt(1.0 - t * t) / t + 2.0 * np.arcsin(t)

    low = 3.0 / math.pi * (G(v) - G(_V_MIN))
    high = 1.0 - 3.0 / (math.pi * np.maximum(v, 1.0))
    out = np.where(v < 1.0, low, high)
    return np.where(v < _V_MIN, 0.0, out)


def siegel_value(b: LatticeBasis, region, primitive: bool = False) -> int:
    return count_points(b, region, primitive_only=primitive)


# ---------------------------------------------------------------- Monte Carlo

def _worker(args) -> tuple[np.ndarray, np.ndarray]:
    region, n, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    u, v = sample_fundamental_domain(rng, n)
    theta = rng.random(n) * 2 * math.pi
    full = np.empty(n, dtype=np.int64)
    prim = np.empty(n, dtype=np.int64)
    for i in range(n):
        b = LatticeBasis(haar_basis(u[i], v[i], theta[i]))
        full[i], prim[i] = count_both(b, region)
    return full, prim


def mc_counts(region, n_samples: int, seed: int = 0, threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Full and primitive counts over ``n_samples`` Haar lattices.

    Work is split into ``threads`` blocks, each with its own spawned seed;
    the result depends only on (seed, threads), not on scheduling.
    """
    if getattr(region, "d", None) != 2:
        raise ValueError("Haar sampling is only available for d = 2")
    threads = max(1, int(threads))
    sizes = [n_samples // threads + (1 if w < n_samples % threads else 0) for w in range(threads)]
    seqs = np.random.SeedSequence(seed).spawn(threads)
    jobs = [(region, n, s) for n, s in zip(sizes, seqs)]
    if threads == 1:
        parts = [_worker(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_worker, jobs))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _estimate(counts: np.ndarray, moment: int, seed, target, blocks: int = 1) -> MomentEstimate:
    # merge per-block accumulators in block order, mirroring the worker split
    acc1, acc2 = Welford(), Welford()
    for chunk in np.array_split(counts.astype(float), blocks):
        w1, w2 = Welford(), Welford()
        w1.add_many(chunk)
        w2.add_many(chunk ** 2)
        acc1.merge(w1)
        acc2.merge(w2)
    main = acc1 if moment == 1 else acc2
    return MomentEstimate(main.mean, main.std_error, acc1.n, seed, moment,
                          acc1.mean, acc2.mean, target)


def _check_n(n_samples: int) -> None:
    if n_samples < 100:
        raise ValueError("need at least 100 samples")


def mean_target(region, primitive: bool) -> float:
    vol = region.volume()
    return vol / zeta(2.0) if primitive else vol


def second_moment_target(region, primitive: bool):
    if primitive and isinstance(region, PRegion) and region.cap is None and region.T > 1:
        from .moment2d import ky_second_norm
        return ky_second_norm(region.c, region.T)
    return None


def mc_mean(region, primitive: bool = False, n_samples: int = 10_000, seed: int = 0,
            threads: int = 1) -> MomentEstimate:
    _check_n(n_samples)
    full, prim = mc_counts(region, n_samples, seed, threads)
    return _estimate(prim if primitive else full, 1, seed, mean_target(region, primitive), threads)


def mc_second_moment(region, primitive: bool = False, n_samples: int = 10_000, seed: int = 0,
                     threads: int = 1) -> MomentEstimate:
    _check_n(n_samples)
    full, prim = mc_counts(region, n_samples, seed, threads)
    return _estimate(prim if primitive else full, 2, seed, second_moment_target(region, primitive), threads)


def mc_all_moments(region, n_samples: int = 10_000, seed: int = 0, threads: int = 1) -> dict:
    """Mean and second moment, full and primitive, from one sample set."""
    _check_n(n_samples)
    full, prim = mc_counts(region, n_samples, seed, threads)
    return {
        "mean": _estimate(full, 1, seed, mean_target(region, False), threads),
        "mean_primitive": _estimate(prim, 1, seed, mean_target(region, True), threads),
        "second": _estimate(full, 2, seed, None, threads),
        "second_primitive": _estimate(prim, 2, seed, second_moment_target(region, True), threads),
    }


# ---------------------------------------------------------------- analytic moments

def rogers_second_moment_bound(d: int, vol: float) -> float:
    """vol^2 + 2 zeta(d/2)^2 vol, valid for d >= 3."""
    if d < 3:
        raise ValueError("the bound needs d >= 3")
    if vol < 0:
        raise ValueError("vol must be non-negative")
    return vol * vol + 2.0 * zeta(d / 2) ** 2 * vol


def primitive_second_moment_d3(d: int, vol: float, sym_overlap_vol: float = 0.0) -> float:
    """(vol/zeta(d))^2 + vol/zeta(d) + overlap/zeta(d) for the primitive Siegel transform, d >= 3."""
    if d < 3:
        raise ValueError("the formula needs d >= 3")
    if sym_overlap_vol > vol:
        raise ValueError("overlap cannot exceed the volume")
    z = zeta(float(d))
    return (vol / z) ** 2 + vol / z + sym_overlap_vol / z


def primitive_second_moment_region(region) -> float:
    return primitive_second_moment_d3(region.d, region.volume(), symmetric_overlap_volume(region))


def affine_second_moment(vol: float) -> float:
    """Haar mean of the squared affine Siegel transform of an indicator: vol^2 + vol."""
    if vol < 0:
        raise ValueError("vol must be non-negative")
    return vol * vol + vol


def mc_affine_second_moment(region, n_samples: int = 10_000, seed: int = 0) -> MomentEstimate:
    """E[#((Lambda + xi) cap region)^2] over Haar Lambda and a uniform shift xi on the torus."""
    _check_n(n_samples)
    rng = np.random.default_rng(seed)
    u, v = sample_fundamental_domain(rng, n_samples)
    theta = rng.random(n_samples) * 2 * math.pi
    frac = rng.random((n_samples, 2))
    counts = np.empty(n_samples, dtype=np.int64)
    for i in range(n_samples):
        B = haar_basis(u[i], v[i], theta[i])
        counts[i] = count_points(LatticeBasis(B, shift=B @ frac[i]), region)
    return _estimate(counts, 2, seed, affine_second_moment(region.volume()))


def affine_pair_sum_box(basis: LatticeBasis, sides) -> float:
    """sum over lattice vectors k of vol(B cap (B + k)) for the box B = prod [0, sides_i].

    This is the mean of #((Lambda + xi) cap B)^2 over a uniform shift xi;
    averaging it over Haar Lambda gives vol^2 + vol.
    """
    a = np.asarray(sides, dtype=float)
    K = box_points(LatticeBasis(basis.columns), -a, a)
    return float(np.prod(np.clip(a - np.abs(K), 0.0, None), axis=1).sum())


def mc_affine_pair_sum(sides, n_samples: int = 10_000, seed: int = 0) -> MomentEstimate:
    """Haar average of :func:`affine_pair_sum_box` against vol^2 + vol."""
    _check_n(n_samples)
    rng = np.random.default_rng(seed)
    u, v = sample_fundamental_domain(rng, n_samples)
    theta = rng.random(n_samples) * 2 * math.pi
    vals = np.array([affine_pair_sum_box(LatticeBasis(haar_basis(u[i], v[i], theta[i])), sides)
                     for i in range(n_samples)])
    w = Welford()
    w.add_many(vals)
    vol = float(np.prod(sides))
    return MomentEstimate(w.mean, w.std_error, w.n, seed, 2, math.nan, w.mean, affine_second_moment(vol))
