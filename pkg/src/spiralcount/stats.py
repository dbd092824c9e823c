"""Streaming moments with exact parallel merging."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class Welford:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, x: float) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def add_many(self, xs) -> None:
        xs = np.asarray(xs, dtype=float)
        if xs.size:
            self.merge(Welford(xs.size, float(xs.mean()), float(((xs - xs.mean()) ** 2).sum())))

    def merge(self, other: "Welford") -> "Welford":
        """Chan et al. pairwise combination, in place."""
        if other.n == 0:
            return self
        n = self.n + other.n
        delta = other.mean - self.mean
        self.mean += delta * other.n / n
        self.m2 += other.m2 + delta * delta * self.n * other.n / n
        self.n = n
        return self

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else math.nan

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.n) if self.n > 1 else math.nan


@dataclass
class MomentEstimate:
    """Monte Carlo estimate of E[N^moment] for a count N."""

    estimate: float
    std_error: float
    n_samples: int
    seed: Optional[int]
    moment: int = 1
    mean: float = math.nan
    second_moment: float = math.nan
    target: Optional[float] = None

    @property
    def z(self) -> Optional[float]:
        if self.target is None or not self.std_error > 0:
            return None
        return (self.estimate - self.target) / self.std_error

    def within(self, k: float = 3.0) -> bool:
        return self.z is not None and abs(self.z) <= k
