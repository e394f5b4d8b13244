"""Enumeration, annotations, discretization, and the exact-arithmetic oracles."""

import itertools
import math

import numpy as np
import pytest

from beurling import semigroup
from beurling._dispatch import HAVE_NATIVE
from beurling import _pure
from beurling.errors import DomainError, OutOfRangeError, SizeError
from beurling.semigroup import (
    PrimeSystem,
    chebyshev_identity_max_residual,
    discretize,
    enumerate_semigroup,
    load_primes,
    mobius_sieve,
    pi_to_capital_pi,
    save_primes,
    sieve_primes,
)


def brute_force_count(primes, x_max):
    """Count exponent vectors with prod p_i^{e_i} <= x_max (log domain)."""
    logs = np.log(primes)
    limit = math.log(x_max) + 2.0 ** -40
    count = 0

    def rec(i, acc):
        nonlocal count
        if i == len(logs):
            count += 1
            return
        e = 0
        while acc + e * logs[i] <= limit:
            rec(i + 1, acc + e * logs[i])
            e += 1

    rec(0, 0.0)
    return count


class TestSieves:
    def test_primes(self):
        assert list(sieve_primes(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]

    def test_mobius_table(self):
        mu = mobius_sieve(12)
        assert list(mu[1:]) == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]

    def test_mobius_against_factorization(self):
        mu = mobius_sieve(5000)
        for n in (30, 210, 1024, 4620, 4999):
            fac = {}
            m = n
            for p in range(2, n + 1):
                while m % p == 0:
                    fac[p] = fac.get(p, 0) + 1
                    m //= p
            want = 0 if any(e > 1 for e in fac.values()) else (-1) ** len(fac)
            assert mu[n] == want


class TestEnumeration:
    def test_single_prime(self):
        enum = enumerate_semigroup(PrimeSystem(np.array([2.0])), 10.0)
        assert np.allclose(np.exp(enum.log_value), [1, 2, 4, 8])

    def test_rational_n10(self):
        ps = PrimeSystem(sieve_primes(10))
        enum = enumerate_semigroup(ps, 10.0)
        assert enum.counting(10.0) == 10

    def test_equal_value_generators(self):
        # two free generators of equal value: multiplicities counted
        enum = enumerate_semigroup(PrimeSystem(np.array([2.0, 2.0])), 5.0)
        vals = sorted(np.round(np.exp(enum.log_value), 9))
        assert vals == [1.0, 2.0, 2.0, 4.0, 4.0, 4.0]
        assert enum.counting(5.0) == 6

    def test_annotations(self):
        enum = enumerate_semigroup(PrimeSystem(np.array([2.0, 3.0])), 36.0)
        byval = {round(v, 9): (l, m) for v, l, m in zip(np.exp(enum.log_value), enum.lam, enum.mob)}
        assert byval[1.0] == (0.0, 1)
        assert byval[8.0][0] == pytest.approx(math.log(2))
        assert byval[8.0][1] == 0
        assert byval[6.0][0] == 0.0 and byval[6.0][1] == 1
        assert byval[2.0][1] == -1 and byval[3.0][1] == -1

    def test_matches_brute_force(self):
        rng = np.random.default_rng(123)
        for _ in range(5):
            primes = np.sort(rng.uniform(1.5, 12.0, rng.integers(2, 5)))
            x_max = float(rng.uniform(30, 300))
            enum = enumerate_semigroup(PrimeSystem(primes), x_max)
            assert len(enum) == brute_force_count(primes, x_max)

    def test_size_error_carries_bound(self):
        ps = PrimeSystem(sieve_primes(100))
        with pytest.raises(SizeError) as exc:
            enumerate_semigroup(ps, 100.0, max_atoms=10)
        assert exc.value.bound == 100
        assert exc.value.limit == 10

    def test_sorted_and_sq_free_count(self):
        ps = PrimeSystem(sieve_primes(1000))
        enum = enumerate_semigroup(ps, 1000.0)
        assert np.all(np.diff(enum.log_value) >= 0)
        mu = mobius_sieve(1000)
        assert int(np.sum(np.abs(enum.mob))) == int(np.sum(np.abs(mu[1:])))

    def test_backends_agree(self):
        logp = np.ascontiguousarray(np.log(np.array([2.0, 3.0, 5.0, 7.1])))
        limit = math.log(500.0)
        n = _pure.count_words(logp, limit, 2.0 ** -40)
        lv = np.empty(n); lam = np.empty(n); mob = np.empty(n, dtype=np.int8)
        _pure.fill_words(logp, limit, 2.0 ** -40, lv, lam, mob)
        if HAVE_NATIVE:
            from beurling import _native

            n2 = _native.count_words(logp, limit, 2.0 ** -40)
            assert n2 == n
            lv2 = np.empty(n); lam2 = np.empty(n); mob2 = np.empty(n, dtype=np.int8)
            _native.fill_words(logp, limit, 2.0 ** -40, lv2, lam2, mob2)
            o1, o2 = np.argsort(lv), np.argsort(lv2)
            assert np.allclose(lv[o1], lv2[o2])
            assert np.array_equal(mob[o1], mob2[o2])


class TestCountingHelpers:
    def test_pi_to_capital_pi(self):
        ps = PrimeSystem(sieve_primes(100))
        assert pi_to_capital_pi(ps, 10.0) == pytest.approx(4 + 0.5 * 2 + 1 / 3)
        assert pi_to_capital_pi(ps, 2.0) == 1.0
        assert pi_to_capital_pi(ps, 1.5) == 0.0

    def test_chebyshev_identity_random_systems(self):
        rng = np.random.default_rng(42)
        for _ in range(5):
            primes = np.sort(rng.uniform(1.4, 40.0, rng.integers(3, 9)))
            worst = chebyshev_identity_max_residual(PrimeSystem(primes), 1e4)
            assert worst < 1e-9


class TestDiscretize:
    def test_explicit_inverse(self):
        ps = discretize(lambda x: math.log(x), 10)
        assert np.allclose(ps.primes, np.exp(np.arange(1, 11)), rtol=1e-10)

    def test_monotone(self):
        from beurling import zeta

        ps = discretize(zeta.ex53_capital_pi, 500, density=zeta.ex53_pi_density_x)
        assert np.all(np.diff(ps.primes) > 0)

    def test_residuals(self):
        from beurling import zeta

        ps = discretize(zeta.ex53_capital_pi, 10000, density=zeta.ex53_pi_density_x)
        resid = np.abs(zeta.ex53_capital_pi(ps.primes) - np.arange(1.0, 10001.0))
        assert resid[0] < 1e-10  # Pi(p_1) = 1
        assert resid.max() < 1e-10

    def test_range_error(self):
        with pytest.raises(OutOfRangeError):
            discretize(lambda x: min(math.log(x), 3.0), 10, x_upper=1e6)


class TestPrimeIO:
    def test_roundtrip(self, tmp_path):
        ps = PrimeSystem(np.array([2.0, 2.0, 3.141592653589793, 10.5]))
        path = tmp_path / "primes.txt"
        save_primes(path, ps)
        back = load_primes(path)
        assert np.array_equal(back.primes, ps.primes)

    def test_requires_above_one(self):
        with pytest.raises(DomainError):
            PrimeSystem(np.array([0.9, 2.0]))
