import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import NonCoprimeError, UsageError
from .primes import is_prime, simple_sieve

TRIAL_LIMIT = 10**6
RHO_SEED = 0x5EED


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple  # ((prime, exponent), ...) sorted by prime

    def __post_init__(self):
        prod = 1
        last = 0
        for p, e in self.factors:
            if e < 1 or p <= last or not is_prime(p):
                raise ValueError(f"invalid factor entry {(p, e)}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    @property
    def big_omega(self):
        return sum(e for _, e in self.factors)

    @property
    def divisor_count(self):
        return math.prod(e + 1 for _, e in self.factors)

    def primes(self):
        return [p for p, e in self.factors for _ in range(e)]


@lru_cache(maxsize=1)
def _trial_primes():
    return tuple(int(p) for p in simple_sieve(TRIAL_LIMIT))


def _brent_rho(n, rng):
    """One nontrivial factor of the odd composite n (Brent's variant of Pollard rho)."""
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n, seed=RHO_SEED):
    """Prime factorization of 2 <= n < 2**64.

    Trial division up to 10**6, then Pollard rho with a seeded generator so
    repeated calls follow the same path.
    """
    n = int(n)
    if n < 2:
        raise UsageError(f"factorize needs n >= 2, got {n}")
    counts = {}
    rest = n
    for p in _trial_primes():
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            counts[p] = e
    if rest > 1:
        rng = random.Random(seed)
        stack = [rest]
        while stack:
            m = stack.pop()
            if is_prime(m):
                counts[m] = counts.get(m, 0) + 1
                continue
            r = math.isqrt(m)
            if r * r == m:
                stack += [r, r]
                continue
            d = _brent_rho(m, rng)
            stack += [d, m // d]
    return Factorization(n, tuple(sorted(counts.items())))


def big_omega(n):
    return 0 if n == 1 else factorize(n).big_omega


def is_e2(n, squarefree=False):
    """True iff n has exactly two prime factors with multiplicity (distinct if ``squarefree``)."""
    if n < 4:
        return False
    f = factorize(n)
    if f.big_omega != 2:
        return False
    return len(f.factors) == 2 or not squarefree


def divisor_count(n):
    return 1 if n == 1 else factorize(n).divisor_count


def mod_inverse(a, q):
    if q < 2:
        raise UsageError(f"modulus must be >= 2, got {q}")
    if math.gcd(a, q) != 1:
        raise NonCoprimeError(f"gcd({a}, {q}) = {math.gcd(a, q)} != 1")
    return pow(a, -1, q)


def mod_inverse_array(a, m):
    """Elementwise inverse of a modulo m (int64 arrays, gcd 1 assumed; m == 1 gives 0)."""
    a = np.asarray(a, dtype=np.int64)
    m = np.broadcast_to(np.asarray(m, dtype=np.int64), a.shape).copy()
    r0, r1 = m.copy(), a % m
    s0, s1 = np.zeros_like(a), np.ones_like(a)
    active = r1 != 0
    while active.any():
        qq = np.where(active, r0 // np.where(active, r1, 1), 0)
        r0, r1 = np.where(active, r1, r0), np.where(active, r0 - qq * r1, r1)
        s0, s1 = np.where(active, s1, s0), np.where(active, s0 - qq * s1, s1)
        active = r1 != 0
    if np.any((r0 != 1) & (m != 1)):
        raise NonCoprimeError("mod_inverse_array: some entries are not invertible")
    return s0 % m
