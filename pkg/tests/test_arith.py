import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from e2lab.arith import (
    PHI,
    SQRT2,
    E,
    ContinuedFraction,
    IntervalReal,
    certify_distance_bound,
    convergents,
    convergents_in_range,
    distance_interval,
    divisor_count,
    factorize,
    is_e2,
    is_prime,
    is_prime_array,
    mod_inverse,
    mod_inverse_array,
    nearest_int_distance,
    omega2_mask,
    primes_in_range,
    simple_sieve,
    varpi,
)
from e2lab.errors import NonCoprimeError, PrecisionExhausted


def trial_factor(n):
    out, d = [], 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def test_is_prime_examples():
    assert is_prime(2)
    assert not is_prime(1)
    assert not is_prime(10001)
    assert 73 * 137 == 10001


def test_is_prime_matches_sieve():
    limit = 200_000
    sieve = set(simple_sieve(limit).tolist())
    vals = np.arange(limit + 1)
    mask = is_prime_array(vals)
    assert set(vals[mask].tolist()) == sieve
    assert all(is_prime(n) == (n in sieve) for n in range(0, 5000))


def test_large_primes():
    assert is_prime(2**61 - 1)
    assert not is_prime((2**31 - 1) * (2**32 - 5))
    assert is_prime(18446744073709551557)  # largest prime below 2^64


def test_segmented_sieve():
    ps = primes_in_range(10**6, 10**6 + 1000)
    assert ps.tolist() == [n for n in range(10**6, 10**6 + 1000) if is_prime(n)]


def test_factorize_examples():
    assert list(factorize(12).factors) == [(2, 2), (3, 1)]
    assert list(factorize(121).factors) == [(11, 2)]
    assert list(factorize(990100).factors) == [(2, 2), (5, 2), (9901, 1)]


def test_factorize_reconstructs():
    for n in range(2, 20000):
        f = factorize(n)
        assert math.prod(p**e for p, e in f.factors) == n
        assert list(f.factors) == trial_factor(n)


def test_factorize_large_semiprime():
    p, q = 4294967291, 4294967279
    assert factorize(p * q).primes() == [q, p]


def test_is_e2_examples():
    assert is_e2(6)
    assert not is_e2(12)
    assert is_e2(121)
    assert not is_e2(121, squarefree=True)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 2**31), st.integers(2, 2**31))
def test_is_e2_products_of_primes(a, b):
    pa = next(n for n in range(a, a + 10**6) if is_prime(n))
    pb = next(n for n in range(b, b + 10**6) if is_prime(n))
    assert is_e2(pa * pb)


def test_omega2_mask_matches_factorization():
    vals = np.arange(2, 30000)
    mask = omega2_mask(vals)
    assert mask.tolist() == [is_e2(int(n)) for n in vals]


def test_varpi_and_divisors():
    assert varpi(7) == pytest.approx(1.945910, abs=1e-6)
    assert varpi(8) == 0
    assert varpi(2) == pytest.approx(0.693147, abs=1e-6)
    assert divisor_count(1) == 1
    assert divisor_count(12) == 6
    assert divisor_count(9901) == 2


def test_mod_inverse():
    assert mod_inverse(1, 7) == 1
    assert mod_inverse(100, 10001) == 9901
    assert mod_inverse(3, 10) == 7
    with pytest.raises(NonCoprimeError):
        mod_inverse(4, 10)


def test_mod_inverse_random():
    rng = random.Random(1)
    for _ in range(10000):
        q = rng.randint(2, 10**9)
        a = rng.randint(1, q - 1)
        if math.gcd(a, q) == 1:
            assert a * mod_inverse(a, q) % q == 1


def test_mod_inverse_array():
    out = mod_inverse_array(np.array([3, 100, 2, 5, 7]), np.array([10, 10001, 5, 1, 12]))
    assert out.tolist() == [7, 9901, 3, 0, 7]
    with pytest.raises(NonCoprimeError):
        mod_inverse_array(np.array([2]), np.array([4]))


def test_nearest_int_distance():
    assert nearest_int_distance(Fraction(23, 10)) == Fraction(3, 10)
    assert nearest_int_distance(Fraction(1, 2)) == Fraction(1, 2)
    assert nearest_int_distance(Fraction(-1, 4)) == Fraction(1, 4)


@given(st.fractions(), st.integers(-10**6, 10**6))
def test_nearest_int_distance_periodic(x, k):
    d = nearest_int_distance(x)
    assert d == nearest_int_distance(x + k)
    assert 0 <= d <= Fraction(1, 2)


def test_convergents_examples():
    assert [(c.numerator, c.denominator) for c in convergents(SQRT2, 4)] == [(1, 1), (3, 2), (7, 5), (17, 12)]
    assert [(c.numerator, c.denominator) for c in convergents(PHI, 5)] == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]
    assert convergents(SQRT2, 0) == []
    assert [c.denominator for c in convergents(E, 6)] == [1, 1, 3, 4, 7, 32]


@pytest.mark.parametrize("alpha", [SQRT2, PHI, E])
def test_convergent_quality(alpha):
    lo, hi = alpha.interval(512)
    for c in convergents(alpha, 40):
        f = Fraction(c.numerator, c.denominator)
        assert max(abs(lo - f), abs(hi - f)) <= Fraction(1, c.denominator**2)


def test_convergents_in_range():
    qs = [c.denominator for c in convergents_in_range(SQRT2, 10**3, 10**5)]
    assert qs == [2378, 5741, 13860, 33461, 80782]


def test_finite_quotient_list_is_rational():
    cf = ContinuedFraction([0, 3])
    assert cf.interval() == (Fraction(1, 3), Fraction(1, 3))
    assert [c.denominator for c in convergents_in_range(cf, 1, 100)] == [1, 3]


def test_distance_certification():
    ok, (lo, hi) = certify_distance_bound(SQRT2, 13860, Fraction(1, 3))
    assert ok and lo <= hi
    d = distance_interval(SQRT2, 12)
    assert d[0] <= Fraction(1, 24) and d[1] > 0
    with pytest.raises(PrecisionExhausted):
        certify_distance_bound(IntervalReal(Fraction(1, 3), Fraction(1, 3) + Fraction(1, 10**6)), 3 * 10**6,
                               Fraction(1, 3))
