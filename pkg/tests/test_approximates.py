import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import approximate_holds_mp, convergents
from spiralcount.approximates import (approximate_target, counting_series, enumerate_approximates,
                                      spiralling_counts)
from spiralcount.geometry import SphericalCap
from spiralcount.numtheory import zeta

PHI = 1.6180339887


def brute_pairs(x, c, T):
    """All (p, q) with ||q x - p|| < c q^(-1/d), p in a generous box."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = x.size
    out = []
    for q in range(1, int(math.floor(T)) + 1):
        bound = c * q ** (-1 / d)
        centre = np.round(q * x).astype(int)
        rad = int(math.ceil(bound)) + 1
        grids = np.meshgrid(*[np.arange(cc - rad, cc + rad + 1) for cc in centre], indexing="ij")
        P = np.stack([g.ravel() for g in grids], axis=1)
        err = np.linalg.norm(q * x - P, axis=1)
        for p in P[err < bound]:
            out.append((tuple(int(a) for a in p), q))
    return sorted(out, key=lambda t: (t[1], t[0]))


class TestEnumerate:
    def test_golden(self):
        pairs = enumerate_approximates(PHI, 0.5, 5)
        assert [(p.p[0], p.q) for p in pairs] == [(2, 1), (3, 2), (5, 3), (8, 5)]

    def test_zero(self):
        pairs = enumerate_approximates(0.0, 0.5, 10)
        assert [(p.p[0], p.q) for p in pairs] == [(0, q) for q in range(1, 11)]
        assert all(p.err_norm == 0 and p.dir is None for p in pairs)

    def test_small_T(self):
        assert enumerate_approximates(0.3, 1.0, 0.5) == []

    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=3), st.floats(0.05, 2.5), st.integers(1, 60))
    def test_matches_brute_force(self, x, c, T):
        got = [(p.p, p.q) for p in enumerate_approximates(x, c, T)]
        assert got == brute_pairs(x, c, T)

    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=3), st.floats(0.05, 2.0), st.integers(1, 300))
    def test_extended_precision_recheck(self, x, c, T):
        for p in enumerate_approximates(x, c, T):
            assert approximate_holds_mp(x, p.p, p.q, c)

    @given(st.floats(0, 10), st.floats(0.1, 2), st.integers(1, 200))
    def test_sorted_and_deterministic(self, x, c, T):
        a = enumerate_approximates(x, c, T)
        assert [p.q for p in a] == sorted(p.q for p in a)
        assert a == enumerate_approximates(x, c, T)

    @given(st.floats(0.0, 1.0).filter(lambda v: v not in (0.0, 1.0)), st.floats(0.05, 0.499))
    def test_coprime_pairs_are_convergents(self, x, c):
        conv = set(convergents(x))
        for p in enumerate_approximates(x, c, 10 ** 4, coprime=True):
            assert (p.p[0], p.q) in conv

    def test_direction_unit(self):
        for p in enumerate_approximates([0.31, 0.77], 1.0, 500):
            if p.dir is not None:
                assert np.linalg.norm(p.dir) == pytest.approx(1.0, abs=1e-12)
                assert np.allclose(np.array(p.dir) * p.err_norm, p.err)


class TestSpiralling:
    def test_golden_alternates(self):
        s = spiralling_counts(PHI, 0.5, 5, SphericalCap.points([1]))
        assert (s.n_total, s.n_in_cap, s.ratio) == (4, 2, 0.5)

    def test_full_and_empty(self):
        assert spiralling_counts(PHI, 0.5, 100, SphericalCap.points([-1, 1])).ratio == 1
        assert spiralling_counts(PHI, 0.5, 100, SphericalCap.points([])).ratio == 0

    def test_exact_excluded(self):
        s = spiralling_counts(0.0, 0.5, 10, SphericalCap.points([1]))
        assert s.n_total == 0 and s.n_exact == 10 and s.ratio is None

    def test_cap_dimension_checked(self):
        with pytest.raises(ValueError):
            spiralling_counts([0.1, 0.2], 1, 10, SphericalCap.points([1]))

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, math.pi), st.floats(0, 2 * math.pi))
    def test_complement_sums_to_one(self, a, b, angle, phi):
        cap = SphericalCap(1, (math.cos(phi), math.sin(phi)), angle)
        s1 = spiralling_counts([a, b], 1.0, 300, cap)
        s2 = spiralling_counts([a, b], 1.0, 300, cap.complement())
        if s1.n_total:
            # ties on the cap boundary are counted on both sides, so allow equality only
            assert s1.n_in_cap + s2.n_in_cap >= s1.n_total
            if 0 < angle < math.pi:
                assert s1.ratio + s2.ratio == pytest.approx(1.0) or s1.n_in_cap + s2.n_in_cap > s1.n_total


class TestSeries:
    def test_single_row(self):
        s = counting_series(0.377, 1.0, [500])
        assert s.statistic[0] == len(enumerate_approximates(0.377, 1.0, 500))

    def test_grid_matches_direct(self):
        s = counting_series([0.2, 0.9], 0.8, [10, 100, 1000], coprime=True)
        for T, v in zip(s.T, s.statistic):
            assert v == len(enumerate_approximates([0.2, 0.9], 0.8, T, coprime=True))

    def test_rational_flagged(self):
        s = counting_series(0.0, 0.5, [10, 20])
        assert s.statistic.tolist() == [10, 20] and s.meta["degenerate"]

    def test_target(self):
        assert approximate_target(1, 1.0, math.e) == pytest.approx(2.0)
        assert approximate_target(1, 1.0, math.e, coprime=True) == pytest.approx(2.0 / zeta(2))
        assert approximate_target(2, 0.5, math.e) == pytest.approx(0.25 * math.pi)

    @pytest.mark.slow
    def test_primitive_average(self):
        rng = np.random.default_rng(3)
        vals = [counting_series(rng.random(), 1.0, [1e6], coprime=True).statistic[0] / math.log(1e6)
                for _ in range(500)]
        assert np.mean(vals) == pytest.approx(2 / zeta(2), rel=0.05)

    @pytest.mark.slow
    def test_primitive_average_from_q2(self):
        # same draws with the two q = 1 pairs removed; this is the lattice count over 1 < q <= T
        rng = np.random.default_rng(3)
        vals = []
        for _ in range(500):
            s = counting_series(rng.random(), 1.0, [1.5, 1e6], coprime=True)
            vals.append((s.statistic[1] - s.statistic[0]) / math.log(1e6))
        assert np.mean(vals) == pytest.approx(2 / zeta(2), rel=0.05)
