import json
import math

import numpy as np
import pytest

from oracles import brute_force_points, coefficient_radius, p_member, r_member
from spiralcount.experiment import emit_report
from spiralcount.geometry import PRegion, RRegion
from spiralcount.harness import ConfigError, SweepConfig, load_config, run_sweep
from spiralcount.lattice import count_points, dani_lattice, linear_forms_lattice


def test_count_target():
    res = run_sweep(SweepConfig(kind="count", primitive=True, c=1.0, T_grid=[10.0, 100.0, 1000.0],
                                replications=2, seed=1))
    want = [2 * math.log(T) / (math.pi ** 2 / 6) for T in (10, 100, 1000)]
    assert res.average.target == pytest.approx(want, rel=1e-14)
    assert len(res.replicates) == 2


def test_spiral_target_half():
    res = run_sweep(SweepConfig(kind="spiral", d=3, T_grid=[20.0, 50.0], replications=3))
    assert np.all(res.average.target == 0.5)


@pytest.mark.parametrize("primitive", [False, True])
def test_single_row_is_direct_count(primitive):
    x = [0.3819660112501051]
    res = run_sweep(SweepConfig(kind="count", x=x, T_grid=[500.0], replications=1, primitive=primitive))
    direct = count_points(dani_lattice(np.array(x)), PRegion(2, T=500, c=1), primitive_only=primitive)
    assert res.average.statistic.tolist() == [direct]


def test_grid_counts_match_brute_force():
    x = np.array([0.2718])
    res = run_sweep(SweepConfig(kind="count", x=x.tolist(), T_grid=[5.0, 20.0, 60.0], replications=1))
    B = dani_lattice(x).columns
    for T, got in zip([5.0, 20.0, 60.0], res.average.statistic):
        rad = coefficient_radius(B, [1.0, T])
        assert got == len(brute_force_points(B, p_member(2, T, 1.0), rad))


def test_linear_grid_counts_match_brute_force():
    M = [[0.41]]
    res = run_sweep(SweepConfig(kind="linear", m=1, n=1, x=[0.41], T_grid=[5.0, 15.0], replications=1))
    B = linear_forms_lattice(np.array(M)).columns
    for T, got in zip([5.0, 15.0], res.average.statistic):
        rad = coefficient_radius(B, [1.0, T])
        assert got == len(brute_force_points(B, r_member(1, 1, T, 1.0), rad))


def test_affine_shift_recorded():
    res = run_sweep(SweepConfig(kind="affine", T_grid=[10.0, 100.0], replications=2, seed=3))
    for r in res.replicates:
        assert len(r.meta["xi"]) == 2
    assert res.average.target == pytest.approx([RRegion(1, 1, T=T, c=1).volume() for T in (10, 100)])


def test_deterministic_csv(tmp_path):
    cfg = SweepConfig(kind="approx", T_grid=[10.0, 100.0, 1000.0], replications=5, seed=9, primitive=True)
    a = emit_report(run_sweep(cfg).average, "csv")
    b = emit_report(run_sweep(cfg).average, "csv")
    assert a == b


def test_threads_do_not_change_results():
    base = SweepConfig(kind="count", T_grid=[10.0, 1000.0], replications=6, seed=2)
    one = run_sweep(base)
    many = run_sweep(SweepConfig(**{**base.to_dict(), "threads": 3}))
    assert one.average.statistic.tolist() == many.average.statistic.tolist()
    assert [r.meta["x"] for r in one.replicates] == [r.meta["x"] for r in many.replicates]


@pytest.mark.parametrize("field,value", [
    ("kind", "nope"), ("d", 1), ("c", -1.0), ("T_grid", []), ("T_grid", [10.0, 5.0]),
    ("T_grid", [1.0, 10.0]), ("replications", 0), ("threads", 0), ("x", [0.1, 0.2]),
])
def test_invalid_config_names_field(field, value):
    with pytest.raises(ConfigError) as exc:
        SweepConfig(**{field: value}).validate()
    assert exc.value.field == field
    assert field in str(exc.value)


def test_unknown_field(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"kind": "count", "colour": 3}))
    with pytest.raises(ConfigError) as exc:
        load_config(p)
    assert exc.value.field == "colour"


def test_primitive_affine_rejected():
    with pytest.raises(ConfigError) as exc:
        SweepConfig(kind="affine", primitive=True).validate()
    assert exc.value.field == "primitive"


@pytest.mark.slow
def test_residual_shrinks_like_inverse_sqrt():
    # spiral ratios are unbiased for 1/2 by the symmetry x -> 1 - x, so the
    # averaged residual is pure noise; its RMS over groups of size R should scale as R^(-1/2)
    total = 20_000
    res = run_sweep(SweepConfig(kind="spiral", d=3, T_grid=[50.0], replications=total, seed=21))
    r = np.array([s.statistic[0] for s in res.replicates]) - 0.5
    Rs = np.array([10, 100, 1000])
    rms = [math.sqrt(np.mean(r[: total // R * R].reshape(-1, R).mean(axis=1) ** 2)) for R in Rs]
    slope = np.polyfit(np.log(Rs), np.log(rms), 1)[0]
    print(f"rms {rms} slope {slope:.3f}")
    assert abs(slope + 0.5) <= 0.15


@pytest.mark.slow
def test_count_mean_matches_exact_finite_T_mean():
    # over uniform x, sum_{2 <= q <= T} 2 phi(q)/q^2 is the exact expected primitive count (c = 1)
    from oracles import naive_totient
    T = 3000
    res = run_sweep(SweepConfig(kind="count", primitive=True, T_grid=[float(T)], replications=2000, seed=0))
    counts = np.array([s.statistic[0] for s in res.replicates])
    exact = sum(2 * naive_totient(q) / q ** 2 for q in range(2, T + 1))
    se = counts.std(ddof=1) / math.sqrt(counts.size)
    assert abs(counts.mean() - exact) < 3 * se
