import math

import numpy as np
import pytest
from scipy import stats

from oracles import zeta_mp
from spiralcount.geometry import PRegion
from spiralcount.haar import (HaarSample, affine_pair_sum_box, affine_second_moment, haar_basis,
                              mc_affine_pair_sum, mc_all_moments, mc_counts, mc_mean, mc_second_moment,
                              primitive_second_moment_d3, primitive_second_moment_region,
                              rogers_second_moment_bound, sample_fundamental_domain, sample_haar_batch,
                              sample_haar_x2, siegel_value, v_marginal_cdf)
from spiralcount.lattice import LatticeBasis, count_both
from spiralcount.numtheory import zeta
from spiralcount.stats import Welford


@pytest.fixture(scope="module")
def domain_sample():
    return sample_fundamental_domain(np.random.default_rng(2024), 100_000)


class TestSampler:
    def test_in_domain(self, domain_sample):
        u, v = domain_sample
        assert np.all(np.abs(u) <= 0.5) and np.all(u * u + v * v >= 1)

    def test_tail_probability(self, domain_sample):
        _, v = domain_sample
        hits = (v > 2).astype(float)
        se = hits.std() / math.sqrt(hits.size)
        assert abs(hits.mean() - 3 / (2 * math.pi)) <= 3 * se

    def test_u_mean(self, domain_sample):
        u, _ = domain_sample
        assert abs(u.mean()) <= 3 * u.std() / math.sqrt(u.size)

    def test_ks(self, domain_sample):
        _, v = domain_sample
        res = stats.kstest(v, v_marginal_cdf)
        assert res.statistic < 1.628 / math.sqrt(v.size)  # 1% critical value

    def test_cdf_shape(self):
        assert v_marginal_cdf(math.sqrt(3) / 2) == pytest.approx(0.0, abs=1e-15)
        assert v_marginal_cdf(2.0) == pytest.approx(1 - 3 / (2 * math.pi))
        xs = np.linspace(0.8, 10, 200)
        assert np.all(np.diff(v_marginal_cdf(xs)) >= 0)

    def test_determinants(self):
        for s in sample_haar_batch(np.random.default_rng(1), 2000):
            assert abs(np.linalg.det(haar_basis(s.u, s.v, s.theta)) - 1) < 1e-12
        assert isinstance(sample_haar_x2(np.random.default_rng(0)), HaarSample)

    def test_seeded(self):
        a = sample_fundamental_domain(np.random.default_rng(5), 100)
        b = sample_fundamental_domain(np.random.default_rng(5), 100)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


class TestSiegel:
    def test_z2(self):
        z2 = LatticeBasis(np.eye(2))
        assert siegel_value(z2, PRegion(2, T=10, c=1)) == 9
        assert siegel_value(z2, PRegion(2, T=10, c=1), primitive=True) == 0
        assert siegel_value(z2, PRegion(2, T=1, c=1)) == 0

    @pytest.mark.parametrize("c,T", [(1, 10), (0.5, 100), (2, 5)])
    def test_mean_grid(self, c, T):
        est = mc_mean(PRegion(2, T=T, c=c), n_samples=40_000, seed=17)
        assert est.within(3), est

    def test_primitive_ratio(self):
        full, prim = mc_counts(PRegion(2, T=10, c=1), 40_000, seed=8)
        r = prim.mean() / full.mean()
        # delta method for the ratio of means
        cov = np.cov(full, prim)
        g = np.array([-prim.mean() / full.mean() ** 2, 1 / full.mean()])
        se = math.sqrt(g @ cov @ g / full.size)
        assert abs(r - 1 / zeta(2)) <= 3 * se

    def test_degenerate(self):
        assert mc_mean(PRegion(2, T=1, c=1), n_samples=200).estimate == 0
        assert mc_second_moment(PRegion(2, T=1, c=1), n_samples=200).estimate == 0

    def test_jensen(self):
        for seed in range(3):
            m = mc_all_moments(PRegion(2, T=20, c=0.7), 2_000, seed)
            assert m["second"].estimate >= m["mean"].estimate ** 2
            assert m["second_primitive"].estimate >= m["mean_primitive"].estimate ** 2

    def test_min_samples(self):
        with pytest.raises(ValueError):
            mc_mean(PRegion(2, T=10, c=1), n_samples=50)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(99)
        u, v = sample_fundamental_domain(rng, 20_000)
        th = rng.random(20_000) * 2 * math.pi
        region = PRegion(2, T=10, c=1)
        base = np.array([count_both(LatticeBasis(haar_basis(a, b, t)), region)[0] for a, b, t in zip(u, v, th)])
        turned = np.array([count_both(LatticeBasis(haar_basis(a, b, t + 0.9)), region)[0] for a, b, t in zip(u, v, th)])
        se = math.hypot(base.std(), turned.std()) / math.sqrt(base.size)
        assert abs(base.mean() - turned.mean()) <= 3 * se

    def test_thread_determinism(self):
        r = PRegion(2, T=10, c=1)
        a = mc_counts(r, 600, seed=3, threads=2)
        b = mc_counts(r, 600, seed=3, threads=2)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_welford_merge(self):
        xs = np.random.default_rng(0).normal(size=1001)
        a, b, w = Welford(), Welford(), Welford()
        a.add_many(xs[:400])
        b.add_many(xs[400:])
        w.add_many(xs)
        a.merge(b)
        assert a.mean == pytest.approx(w.mean, rel=1e-13)
        assert a.variance == pytest.approx(np.var(xs, ddof=1), rel=1e-12)


class TestFormulas:
    def test_rogers(self):
        assert rogers_second_moment_bound(4, 0) == 0
        # 1 + 2 zeta(2)^2 and 4 + 4 zeta(3/2)^2, recomputed with mpmath zeta values
        assert rogers_second_moment_bound(4, 1) == pytest.approx(1 + 2 * zeta_mp(2) ** 2, abs=1e-12)
        assert rogers_second_moment_bound(4, 1) == pytest.approx(6.411616, abs=1e-6)
        assert rogers_second_moment_bound(3, 2) == pytest.approx(31.298020, abs=1e-6)
        with pytest.raises(ValueError):
            rogers_second_moment_bound(2, 1)

    def test_primitive_d3(self):
        assert primitive_second_moment_d3(3, 0) == 0
        # vol = zeta(3): (vol/zeta(3))^2 + vol/zeta(3) = 2
        assert primitive_second_moment_d3(3, zeta(3)) == pytest.approx(2.0, abs=1e-12)
        assert primitive_second_moment_d3(3, zeta(3), zeta(3) / 2) == pytest.approx(2.5, abs=1e-12)
        with pytest.raises(ValueError):
            primitive_second_moment_d3(3, 1.0, 2.0)
        r = PRegion(3, T=10, c=1)
        v = r.volume() / zeta(3)
        assert primitive_second_moment_region(r) == pytest.approx(v * v + v)

    def test_affine(self):
        assert affine_second_moment(0) == 0
        assert affine_second_moment(1) == 2
        assert affine_second_moment(4.605170) == pytest.approx(25.81277, abs=1e-5)

    @pytest.mark.parametrize("a,b", [(1.5, 2.3), (0.4, 3.0), (2.0, 2.0), (0.7, 0.2)])
    def test_pair_sum_z2_exact(self, a, b):
        # over a uniform shift, counts in [0, a] are floor(a) or floor(a)+1 with P = frac(a)
        def m2(s):
            f = math.floor(s)
            return f * f + (s - f) * (2 * f + 1)
        assert affine_pair_sum_box(LatticeBasis(np.eye(2)), [a, b]) == pytest.approx(m2(a) * m2(b), rel=1e-12)

    def test_pair_sum_shift_sampling(self):
        rng = np.random.default_rng(4)
        B = np.array([[1.3, 0.4], [0.2, 1 / 1.3 + 0.4 * 0.2 / 1.3]])
        basis = LatticeBasis(B)
        sides = np.array([1.7, 0.9])
        xi = rng.random((40_000, 2)) @ B.T
        counts = []
        for s in xi:
            pts = np.array([[i, j] for i in range(-4, 6) for j in range(-4, 6)]) @ B.T + s
            counts.append(np.count_nonzero(np.all((pts >= 0) & (pts <= sides), axis=1)))
        c2 = np.array(counts, dtype=float) ** 2
        assert abs(c2.mean() - affine_pair_sum_box(basis, sides)) <= 3 * c2.std() / math.sqrt(c2.size)

    def test_pair_sum_haar_average(self):
        est = mc_affine_pair_sum([1.5, 2.3], 20_000, seed=1)
        assert est.within(3), est
