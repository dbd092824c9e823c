import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from oracles import abel_direct, naive_totient, zeta_mp
from spiralcount.numtheory import (abel_summation, phi_ratio_cumsum, phi_ratio_partial_sum,
                                   totient_sieve, walfisz_envelope, walfisz_residual, zeta)


class TestTotient:
    def test_examples(self):
        phi = totient_sieve(100)
        assert (phi[1], phi[12], phi[97]) == (1, 4, 96)

    def test_against_gcd_count(self):
        phi = totient_sieve(10 ** 4)
        idx = np.r_[1:400, np.random.default_rng(0).integers(400, 10 ** 4, 300)]
        assert all(phi[n] == naive_totient(int(n)) for n in idx)

    def test_against_sympy_full(self):
        sympy = pytest.importorskip("sympy")
        phi = totient_sieve(10 ** 4)
        assert all(phi[n] == int(sympy.totient(n)) for n in range(1, 10 ** 4 + 1))

    @given(st.integers(1, 3000), st.integers(1, 3000))
    def test_multiplicative(self, a, b):
        if math.gcd(a, b) == 1:
            phi = totient_sieve(a * b)
            assert phi[a * b] == phi[a] * phi[b]

    def test_primes(self):
        phi = totient_sieve(2000)
        for p in (2, 3, 5, 7, 1009, 1999):
            assert phi[p] == p - 1


class TestPartialSums:
    def test_small(self):
        assert phi_ratio_partial_sum(10) == pytest.approx(6.223810, abs=1e-6)
        assert phi_ratio_partial_sum(1) == 1

    def test_cumsum_consistent(self):
        S = phi_ratio_cumsum(500)
        assert S[500] == pytest.approx(phi_ratio_partial_sum(500), rel=1e-13)

    def test_million(self):
        N = 10 ** 6
        assert N / zeta(2) == pytest.approx(607927.10, abs=0.01)
        assert abs(walfisz_residual(N)) <= 10 * walfisz_envelope(N)

    def test_residual_not_growing(self):
        S = phi_ratio_cumsum(10 ** 7)
        Ns = np.array([10 ** k for k in range(3, 8)] + [int(3 * 10 ** k) for k in range(3, 7)])
        Ns.sort()
        ratio = np.abs(S[Ns] - Ns / zeta(2)) / walfisz_envelope(Ns)
        tau, p = stats.kendalltau(Ns, ratio, alternative="greater")
        assert p > 0.05


class TestZeta:
    @pytest.mark.parametrize("s,ref", [(2, math.pi ** 2 / 6), (4, math.pi ** 4 / 90), (1.5, 2.6123753487)])
    def test_values(self, s, ref):
        assert zeta(s) == pytest.approx(ref, abs=1e-10)

    @given(st.floats(1.01, 40))
    def test_mpmath(self, s):
        assert abs(zeta(s) - zeta_mp(s)) < 1e-12 * max(1.0, zeta_mp(s))

    @pytest.mark.parametrize("s", [1.0, 0.5, -2.0])
    def test_domain(self, s):
        with pytest.raises(ValueError):
            zeta(s)


class TestAbel:
    def test_constant(self):
        for s, x in [(1, 10.5), (3, 7.0), (2, 2.0)]:
            assert abel_summation(np.ones(100), lambda t: 1.0, x, start=s) == pytest.approx(math.floor(x) - s + 1)

    def test_empty(self):
        assert abel_summation(np.ones(5), math.sqrt, 2.5, start=4) == 0

    def test_phi_instance(self):
        c, T = 1.0, 1e4
        x = c * T + c / T
        N = math.floor(x)
        phi = totient_sieve(N)
        a = phi[1:] / np.arange(1, N + 1)
        f = lambda t: math.log(T / t) / t
        direct = abel_direct(a, f, 1, x)
        assert abs(abel_summation(a, f, x) - direct) < 1e-9

    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 20), st.floats(1.0, 400.0),
           st.integers(0, 3), st.integers(0, 2))
    def test_random_pairs(self, seed, start, span, deg, logp):
        rng = np.random.default_rng(seed)
        x = start + span
        a = rng.normal(size=int(x) + 2)
        poly = rng.normal(size=deg + 1)
        f = lambda t: float(np.polyval(poly, t / 100)) * math.log(1 + t) ** logp
        assert abs(abel_summation(a, f, x, start) - abel_direct(a, f, start, x)) < 1e-9 * max(1.0, abs(abel_direct(a, f, start, x)))
