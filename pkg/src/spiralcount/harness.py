"""Sweeps over a T grid, replicated over random x (or M, xi), with averaged series."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .approximates import counting_series, spiralling_counts
from .experiment import ExperimentSeries, average_series
from .geometry import PRegion, RRegion, SphericalCap, cap_measure
from .lattice import _region_coeffs, dani_lattice, linear_forms_lattice
from .numtheory import zeta

KINDS = ("count", "approx", "spiral", "linear", "affine")


class ConfigError(ValueError):
    def __init__(self, field_name: str, msg: str):
        super().__init__(f"{field_name}: {msg}")
        self.field = field_name


@dataclass
class SweepConfig:
    kind: str = "count"
    d: int = 2
    m: int = 1
    n: int = 1
    c: float = 1.0
    T_grid: list = field(default_factory=lambda: [10.0 ** k for k in range(1, 5)])
    replications: int = 10
    seed: int = 0
    primitive: bool = False
    cap: Optional[dict] = None
    x: Optional[list] = None
    threads: int = 1

    def validate(self) -> "SweepConfig":
        if self.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}, got {self.kind!r}")
        if int(self.d) != self.d or self.d < 2:
            raise ConfigError("d", "must be an integer >= 2")
        if self.m < 1 or self.n < 1:
            raise ConfigError("m" if self.m < 1 else "n", "must be >= 1")
        if not (isinstance(self.c, (int, float)) and self.c > 0):
            raise ConfigError("c", "must be a positive number")
        grid = list(self.T_grid or [])
        if not grid:
            raise ConfigError("T_grid", "must be non-empty")
        if any(not (isinstance(t, (int, float)) and t > 1) for t in grid):
            raise ConfigError("T_grid", "entries must be numbers > 1")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("T_grid", "must be strictly increasing")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError("replications", "must be a positive integer")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ConfigError("threads", "must be a positive integer")
        if self.kind == "affine" and self.primitive:
            raise ConfigError("primitive", "has no meaning for affine lattices")
        if self.kind == "spiral" and self.primitive:
            raise ConfigError("primitive", "spiral sweeps count all pairs")
        if self.x is not None:
            want = self.m * self.n if self.kind in ("linear", "affine") else self.d - 1
            if len(self.x) != want:
                raise ConfigError("x", f"needs {want} entries")
        if self.cap is not None:
            if self.kind != "spiral":
                raise ConfigError("cap", "only spiral sweeps take a cap")
            try:
                cap = SphericalCap.from_dict(self.cap)
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError("cap", str(exc)) from None
            if cap.d_sphere != self.d - 2:
                raise ConfigError("cap", f"must live on S^{self.d - 2}")
        return self

    @property
    def cap_obj(self) -> SphericalCap:
        if self.cap is not None:
            return SphericalCap.from_dict(self.cap)
        return SphericalCap.hemisphere(np.eye(self.d - 1)[0])

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        if "config" in data and isinstance(data["config"], dict):
            data = data["config"]  # a JSON report carries its config in meta
        if "meta" in data and isinstance(data["meta"], dict) and "config" in data["meta"]:
            data = data["meta"]["config"]
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
        cfg = cls(**data)
        if cfg.T_grid is not None:
            cfg.T_grid = [float(t) for t in cfg.T_grid] if isinstance(cfg.T_grid, list) else cfg.T_grid
        return cfg.validate()


def load_config(path) -> SweepConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    return SweepConfig.from_dict(data)


@dataclass
class SweepResult:
    replicates: list
    average: ExperimentSeries


def _counts_on_grid(heights: np.ndarray, grid: list, side: str) -> np.ndarray:
    h = np.sort(heights)
    return np.searchsorted(h, grid, side=side).astype(float)


def _replicate(cfg: SweepConfig, seed_seq: np.random.SeedSequence, index: int) -> ExperimentSeries:
    rng = np.random.default_rng(seed_seq)
    grid = [float(t) for t in cfg.T_grid]
    Tmax = grid[-1]
    meta = {"replication": index}
    if cfg.kind in ("count", "approx", "spiral"):
        x = np.asarray(cfg.x, dtype=float) if cfg.x is not None else rng.random(cfg.d - 1)
        meta["x"] = x.tolist()
    if cfg.kind == "count":
        basis = dani_lattice(x)
        K, V = _region_coeffs(basis, PRegion(cfg.d, T=Tmax, c=cfg.c))
        if cfg.primitive and len(K):
            V = V[np.gcd.reduce(np.abs(K), axis=1) == 1]
        # membership 1 < v_d <= T, so a point counts for every T >= v_d
        stat = _counts_on_grid(V[:, -1], grid, "right")
        z = zeta(float(cfg.d)) if cfg.primitive else 1.0
        target = [PRegion(cfg.d, T=t, c=cfg.c).volume() / z for t in grid]
        return ExperimentSeries.from_columns(grid, stat, target, meta)
    if cfg.kind == "approx":
        s = counting_series(x, cfg.c, grid, coprime=cfg.primitive)
        s.meta.update(meta)
        return s
    if cfg.kind == "spiral":
        cap = cfg.cap_obj
        ratios = []
        for t in grid:
            r = spiralling_counts(x, cfg.c, t, cap).ratio
            ratios.append(math.nan if r is None else r)
        return ExperimentSeries.from_columns(grid, ratios, [cap_measure(cap)] * len(grid), meta)
    # linear forms, possibly shifted
    M = (np.asarray(cfg.x, dtype=float).reshape(cfg.m, cfg.n) if cfg.x is not None
         else rng.random((cfg.m, cfg.n)))
    meta["M"] = M.tolist()
    shift = None
    if cfg.kind == "affine":
        B = linear_forms_lattice(M).columns
        shift = B @ rng.random(cfg.m + cfg.n)
        meta["xi"] = shift.tolist()
    basis = linear_forms_lattice(M, shift)
    K, V = _region_coeffs(basis, RRegion(cfg.m, cfg.n, T=Tmax, c=cfg.c))
    if cfg.primitive and len(K):
        V = V[np.gcd.reduce(np.abs(K), axis=1) == 1]
    # membership 1 <= |y| < T, so a point counts for every T > |y|
    stat = _counts_on_grid(np.linalg.norm(V[:, cfg.m:], axis=1), grid, "left")
    z = zeta(float(cfg.m + cfg.n)) if cfg.primitive else 1.0
    target = [RRegion(cfg.m, cfg.n, T=t, c=cfg.c).volume() / z for t in grid]
    return ExperimentSeries.from_columns(grid, stat, target, meta)


def _run_block(args) -> list:
    cfg, jobs = args
    return [_replicate(cfg, s, i) for i, s in jobs]


def run_sweep(config: SweepConfig) -> SweepResult:
    """Every replication gets its own child of SeedSequence(seed); results do not depend on threads."""
    cfg = config.validate()
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
    jobs = list(enumerate(seqs))
    if cfg.threads == 1 or cfg.replications == 1:
        reps = _run_block((cfg, jobs))
    else:
        blocks = [jobs[i::cfg.threads] for i in range(cfg.threads)]
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(_run_block, [(cfg, b) for b in blocks]))
        reps = sorted((s for p in parts for s in p), key=lambda s: s.meta["replication"])
    avg_meta = {"config": cfg.to_dict(), "replications": cfg.replications}
    if cfg.kind == "spiral":
        stat = np.nanmean([s.statistic for s in reps], axis=0)
        avg = ExperimentSeries(reps[0].T.copy(), stat, reps[0].target.copy(), avg_meta)
    else:
        avg = average_series(reps, avg_meta)
    return SweepResult(reps, avg)
