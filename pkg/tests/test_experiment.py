import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spiralcount.experiment import (
    EnvelopeSpec, ExperimentSeries, average_series, emit_report, fit_envelope, read_series_csv,
)
from spiralcount.harness import load_config

GRID = np.array([1e2, 1e3, 1e4, 1e5, 1e6])


def series(stat, target=None, T=GRID):
    target = np.ones_like(T) if target is None else target
    return ExperimentSeries.from_columns(T, stat, target)


def test_zero_residual():
    fit = fit_envelope(series(np.ones(5)), EnvelopeSpec())
    assert fit.C == 0 and fit.passed
    assert np.all(fit.slack == 0)


@pytest.mark.parametrize("kind", ["gaposhkin", "backbone"])
def test_residual_equal_to_envelope(kind):
    spec = EnvelopeSpec(kind, relative=False)
    fit = fit_envelope(series(1 + spec(GRID)), spec)
    assert fit.C == pytest.approx(1.0, rel=1e-12)
    assert fit.passed
    assert np.all(np.abs(fit.slack) < 1e-12)


def test_growth_fails():
    spec = EnvelopeSpec("backbone", relative=False)
    fit = fit_envelope(series(1 + spec(GRID) * np.arange(1, 6)), spec)
    assert not fit.passed


def test_small_T_excluded():
    T = np.array([4.0, 10.0, 20.0, 100.0, 1e3, 1e4, 1e5])
    fit = fit_envelope(series(np.ones(7) * 1.01, T=T), EnvelopeSpec())
    assert fit.excluded == [4.0, 10.0]
    assert math.isnan(fit.envelope[0])


def test_needs_four_rows():
    with pytest.raises(ValueError):
        fit_envelope(series(np.ones(3), T=GRID[:3]), EnvelopeSpec())


@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0), st.integers(0, 1000))
def test_C_monotone_in_epsilon(e1, e2, seed):
    # above exp(e^e) the iterated log exceeds one, so a larger epsilon widens the envelope
    T = np.array([4e6, 1e7, 1e8, 1e9, 1e10])
    rng = np.random.default_rng(seed)
    s = series(1 + rng.normal(0, 0.05, 5), T=T)
    lo, hi = sorted((e1, e2))
    assert fit_envelope(s, EnvelopeSpec(epsilon=hi)).C <= fit_envelope(s, EnvelopeSpec(epsilon=lo)).C


def test_custom_psi():
    spec = EnvelopeSpec("custom", psi=lambda t: math.log(t) ** 2)
    assert np.all(spec(GRID) > 0)
    with pytest.raises(ValueError):
        EnvelopeSpec("custom", psi=lambda t: math.log(t))  # borderline divergent
    with pytest.raises(ValueError):
        EnvelopeSpec("custom", psi=lambda t: 1.0)


def test_average():
    a, b = series([1, 2, 3, 4, 5]), series([3, 2, 1, 0, -1])
    assert np.all(average_series([a, b]).statistic == 2)
    with pytest.raises(ValueError):
        average_series([a, series([1, 2, 3, 4], T=GRID[:4])])


def test_csv_rows(tmp_path):
    s = series(np.arange(5.0))
    text = emit_report(s, "csv", tmp_path / "a.csv")
    lines = text.strip().split("\n")
    assert len(lines) == len(s) + 1
    assert lines[0] == "T,statistic,target,residual,envelope,slack"
    back = read_series_csv(tmp_path / "a.csv")
    assert np.array_equal(back.statistic, s.statistic)


def test_empty_guard():
    with pytest.raises(ValueError):
        emit_report(ExperimentSeries.from_columns([], [], []), "csv")


def test_unwritable(tmp_path):
    with pytest.raises(OSError):
        emit_report(series(np.ones(5)), "csv", tmp_path / "missing" / "x.csv")


def test_json_round_trip(tmp_path):
    from spiralcount.harness import SweepConfig, run_sweep
    cfg = SweepConfig(kind="count", T_grid=[10.0, 100.0], replications=3, seed=4, primitive=True)
    res = run_sweep(cfg)
    path = tmp_path / "r.json"
    emit_report(res.average, "json", path)
    back = load_config(path)
    assert back == cfg
    assert run_sweep(back).average.statistic.tolist() == res.average.statistic.tolist()
    doc = json.loads(path.read_text())
    assert len(doc["rows"]) == 2
