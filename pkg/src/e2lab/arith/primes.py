"""Primality: a deterministic 64-bit Miller-Rabin test plus numpy sieves for bulk work."""
import math
from functools import lru_cache

import numpy as np

# Deterministic for every n < 2**64 (Sinclair's base set).
_MR_BASES_64 = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
# Deterministic for every n < 4_759_123_141 > 2**32.
_MR_BASES_32 = (2, 7, 61)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)

UINT32_LIMIT = 1 << 32


def simple_sieve(limit):
    """Return all primes <= limit as an int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    mask[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if mask[p]:
            mask[p * p::2 * p] = False
    return np.flatnonzero(mask).astype(np.int64)


@lru_cache(maxsize=8)
def _base_primes(limit):
    primes = simple_sieve(limit)
    primes.setflags(write=False)
    return primes


def sieve_segment(lo, out):
    """Fill the boolean buffer ``out`` with primality of lo, lo+1, ..., lo+len(out)-1.

    Writes only into ``out``; disjoint segments may be sieved concurrently.
    """
    hi = lo + len(out)
    out[:] = True
    if lo < 2:
        out[:max(0, min(2, hi) - lo)] = False
    for p in _base_primes(math.isqrt(max(hi - 1, 1))):
        p = int(p)
        start = max(p * p, -(-lo // p) * p)
        if start >= hi:
            continue
        out[start - lo::p] = False
    return out


def primes_in_range(lo, hi, segment=1 << 22):
    """All primes p with lo <= p < hi, via a segmented sieve."""
    lo = max(lo, 0)
    chunks = []
    buf = np.empty(min(segment, max(hi - lo, 0)), dtype=bool)
    start = lo
    while start < hi:
        n = min(segment, hi - start)
        seg = sieve_segment(start, buf[:n])
        chunks.append(np.flatnonzero(seg).astype(np.int64) + start)
        start += n
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(chunks)


def is_prime(n):
    """Deterministic primality test for 0 <= n < 2**64 (and correct beyond, probabilistically never needed)."""
    n = int(n)
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES_64:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _powmod_vec(base, exp, mod):
    # all uint64 with mod < 2**32, so products fit
    result = np.ones_like(mod)
    base = base % mod
    exp = exp.copy()
    while np.any(exp):
        odd = (exp & 1).astype(bool)
        result = np.where(odd, result * base % mod, result)
        base = base * base % mod
        exp >>= np.uint64(1)
    return result


def is_prime_array(values):
    """Vectorised primality for an integer array.

    Entries below 2**32 go through a numpy Miller-Rabin with bases (2, 7, 61);
    anything larger falls back to :func:`is_prime`.
    """
    values = np.asarray(values)
    out = np.zeros(values.shape, dtype=bool)
    flat = values.ravel()
    res = out.ravel()
    big = flat >= UINT32_LIMIT
    if np.any(big):
        idx = np.flatnonzero(big)
        res[idx] = [is_prime(int(v)) for v in flat[idx]]
    small_idx = np.flatnonzero(~big & (flat >= 2))
    if small_idx.size == 0:
        return out
    n = flat[small_idx].astype(np.uint64)
    verdict = np.ones(n.shape, dtype=bool)
    undecided = np.ones(n.shape, dtype=bool)
    for p in _SMALL_PRIMES:
        hit = undecided & (n % np.uint64(p) == 0)
        verdict[hit] = n[hit] == p
        undecided &= ~hit
    cand = np.flatnonzero(undecided)
    if cand.size:
        m = n[cand]
        d = m - np.uint64(1)
        s = np.zeros(m.shape, dtype=np.int64)
        while True:
            even = (d & np.uint64(1)) == 0
            if not even.any():
                break
            d = np.where(even, d >> np.uint64(1), d)
            s += even
        alive = np.ones(m.shape, dtype=bool)
        one = np.uint64(1)
        for a in _MR_BASES_32:
            x = _powmod_vec(np.full(m.shape, a, dtype=np.uint64), d, m)
            ok = (x == one) | (x == m - one)
            for r in range(1, int(s.max())):
                x = x * x % m
                ok |= (x == m - one) & (r < s)
            alive &= ok
        verdict[cand] = alive
    res[small_idx] = verdict
    return out


def prime_mask_range(lo, hi):
    """Boolean mask of primality for the integers lo..hi-1."""
    buf = np.empty(max(hi - lo, 0), dtype=bool)
    return sieve_segment(lo, buf) if len(buf) else buf


def varpi(n):
    """log n at primes, 0 otherwise."""
    return math.log(n) if is_prime(n) else 0.0


def varpi_range(lo, hi):
    """ϖ(n) for n = lo..hi-1 as a float array."""
    n = np.arange(lo, hi, dtype=np.int64)
    mask = prime_mask_range(lo, hi)
    out = np.zeros(len(n))
    out[mask] = np.log(n[mask].astype(float))
    return out


def omega2_mask(values, squarefree=False):
    """Mask of entries with exactly two prime factors counted with multiplicity.

    With ``squarefree=True`` prime squares are excluded. Uses trial division by
    primes up to the cube root of the largest entry: a number with no prime
    factor below its cube root has at most two prime factors.
    """
    values = np.asarray(values, dtype=np.int64)
    if values.size == 0:
        return np.zeros(0, dtype=bool)
    top = int(values.max())
    bound = 1
    while (bound + 1) ** 3 <= top:
        bound += 1
    primes = simple_sieve(bound + 1)
    spf = np.zeros(values.shape, dtype=np.int64)
    open_ = values.copy()
    for p in primes:
        p = int(p)
        hit = (spf == 0) & (open_ % p == 0)
        spf[hit] = p
    rough = spf == 0
    out = np.zeros(values.shape, dtype=bool)
    # no factor <= cube root: composite means exactly two factors
    rv = values[rough]
    out[rough] = (rv > 1) & ~is_prime_array(rv)
    sm = ~rough
    cof = values[sm] // spf[sm]
    out[sm] = is_prime_array(cof)
    if squarefree:
        sq = np.zeros(values.shape, dtype=bool)
        sq[sm] = cof == spf[sm]
        r = np.flatnonzero(out & rough)
        if r.size:
            roots = np.array([math.isqrt(int(v)) for v in values[r]], dtype=np.int64)
            sq[r] = roots * roots == values[r]
        out &= ~sq
    return out
