"""Result series, error envelopes and report writing."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np


@dataclass
class ExperimentSeries:
    """Rows (T, statistic, target); residual = statistic - target."""

    T: np.ndarray
    statistic: np.ndarray
    target: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.T = np.asarray(self.T, dtype=float)
        self.statistic = np.asarray(self.statistic, dtype=float)
        self.target = np.asarray(self.target, dtype=float)
        if not (self.T.shape == self.statistic.shape == self.target.shape) or self.T.ndim != 1:
            raise ValueError("T, statistic and target must be 1-d arrays of equal length")
        if np.any(np.diff(self.T) <= 0):
            raise ValueError("T must be strictly increasing")

    @classmethod
    def from_columns(cls, T, statistic, target, meta=None) -> "ExperimentSeries":
        return cls(np.asarray(T), np.asarray(statistic), np.asarray(target), dict(meta or {}))

    @property
    def residual(self) -> np.ndarray:
        return self.statistic - self.target

    def __len__(self) -> int:
        return self.T.size


def average_series(series: Sequence[ExperimentSeries], meta=None) -> ExperimentSeries:
    if not series:
        raise ValueError("nothing to average")
    T = series[0].T
    for s in series[1:]:
        if not np.array_equal(s.T, T):
            raise ValueError("series have different T grids")
    stat = np.mean([s.statistic for s in series], axis=0)
    return ExperimentSeries(T.copy(), stat, series[0].target.copy(), dict(meta or {}))


# ---------------------------------------------------------------- envelopes

def _psi_admissible(psi: Callable[[float], float]) -> bool:
    """Numerical check that int dt / (t psi(t)) converges.

    With t = exp(exp(v)) the integral becomes int g(v) dv, g(v) = e^v / psi(exp(e^v)).
    Over v in [log 2, log log 1e12] we ask that psi stays positive and
    nondecreasing and that log g falls faster than -log v (power decay with
    exponent below -1, or anything steeper).  A heuristic, not a proof.
    """
    v = np.linspace(math.log(2.0), math.log(math.log(1e12)), 64)
    t = np.exp(np.exp(v))
    vals = np.array([float(psi(ti)) for ti in t])
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0) or np.any(np.diff(vals) < 0):
        return False
    g = np.exp(v) / vals
    slope = np.polyfit(np.log(v), np.log(g), 1)[0]
    return slope < -1.0


@dataclass
class EnvelopeSpec:
    """Shape of the allowed error.  ``relative`` compares |residual| / |target|."""

    kind: str = "gaposhkin"
    epsilon: float = 0.1
    psi: Optional[Callable[[float], float]] = None
    relative: bool = True
    C: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("gaposhkin", "backbone", "custom"):
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.kind == "custom":
            if self.psi is None:
                raise ValueError("custom envelope needs psi")
            if not _psi_admissible(self.psi):
                raise ValueError("psi fails the admissibility check: int dt/(t psi(t)) looks divergent")

    def __call__(self, T) -> np.ndarray:
        L = np.log(np.asarray(T, dtype=float))
        if self.kind == "backbone":
            return L ** -0.5
        if self.kind == "gaposhkin":
            return L ** -0.5 * np.log(L) ** 1.5 * np.log(np.log(L)) ** (0.5 + self.epsilon)
        psi = np.vectorize(lambda s: float(self.psi(s)))
        return np.sqrt(psi(L) / L) * np.log(L)

    def min_T(self) -> float:
        return 16.0 if self.kind in ("gaposhkin", "custom") else math.e


@dataclass
class EnvelopeFit:
    C: float
    passed: bool
    slack: np.ndarray
    envelope: np.ndarray
    per_decade: dict
    excluded: list


def fit_envelope(series: ExperimentSeries, spec: EnvelopeSpec) -> EnvelopeFit:
    """Smallest C with |residual| <= C envelope(T) on every usable row.

    Passing means the constants fitted decade by decade do not increase once
    the first decade is dropped.  Rows with T too small for the iterated
    logarithms are excluded and listed.
    """
    usable = series.T >= spec.min_T()
    excluded = series.T[~usable].tolist()
    if usable.sum() < 4:
        raise ValueError("need at least 4 rows with T large enough for the envelope")
    T = series.T[usable]
    res = np.abs(series.residual[usable])
    if spec.relative:
        res = res / np.abs(series.target[usable])
    env = spec(T)
    ratio = res / env
    C = float(ratio.max())
    decades = np.floor(np.log10(T) + 1e-12).astype(int)
    per_decade = {int(k): float(ratio[decades == k].max()) for k in np.unique(decades)}
    seq = [per_decade[k] for k in sorted(per_decade)][1:]
    # equal constants up to rounding count as non-increasing
    passed = all(b <= a * (1 + 1e-9) for a, b in zip(seq, seq[1:]))
    full_env = np.full(len(series), np.nan)
    full_env[usable] = env
    slack = np.full(len(series), np.nan)
    slack[usable] = C * env - res
    return EnvelopeFit(C, passed, slack, full_env, per_decade, excluded)


# ---------------------------------------------------------------- reports

def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v))


def report_csv(series: ExperimentSeries, fit: Optional[EnvelopeFit] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "statistic", "target", "residual", "envelope", "slack"])
    env = fit.envelope if fit else [None] * len(series)
    slack = fit.slack if fit else [None] * len(series)
    for i in range(len(series)):
        w.writerow([_fmt(series.T[i]), _fmt(series.statistic[i]), _fmt(series.target[i]),
                    _fmt(series.residual[i]), _fmt(env[i]), _fmt(slack[i])])
    return buf.getvalue()


def report_json(series: ExperimentSeries, fit: Optional[EnvelopeFit] = None) -> str:
    rows = []
    for i in range(len(series)):
        row = {"T": float(series.T[i]), "statistic": float(series.statistic[i]),
               "target": float(series.target[i]), "residual": float(series.residual[i])}
        if fit is not None and not math.isnan(fit.envelope[i]):
            row["envelope"] = float(fit.envelope[i])
            row["slack"] = float(fit.slack[i])
        rows.append(row)
    doc = {"meta": series.meta, "rows": rows}
    if fit is not None:
        doc["fit"] = {"C": fit.C, "passed": fit.passed,
                      "per_decade": {str(k): v for k, v in fit.per_decade.items()},
                      "excluded": fit.excluded}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit_report(series: ExperimentSeries, fmt: str = "csv", path=None,
                fit: Optional[EnvelopeFit] = None) -> str:
    """Render the series as CSV or JSON; write it to ``path`` when given."""
    if len(series) == 0:
        raise ValueError("refusing to write an empty series")
    if fmt == "csv":
        text = report_csv(series, fit)
    elif fmt == "json":
        text = report_json(series, fit)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def read_series_csv(path) -> ExperimentSeries:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no rows")
    cols = {k: [float(r[k]) for r in rows] for k in ("T", "statistic", "target")}
    return ExperimentSeries.from_columns(cols["T"], cols["statistic"], cols["target"], {"source": str(path)})
