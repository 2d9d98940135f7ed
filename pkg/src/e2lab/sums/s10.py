"""Twisted prime sums sum_{n1 prime} varpi(n1) e(cl * inv(n1) / n2) and their aggregate.

For each n2 ~ N the partial sums over primes N <= n1 < N' are formed for all
N' at once (a cumulative sum over the primes in [N, 2N)), so the maximum over
N' ~ N of sum_{n2} |partial| is exact.
"""
import math
from dataclasses import dataclass

import numpy as np

from ..arith import mod_inverse_array, primes_in_range
from ..errors import UsageError

_CELL_BUDGET = 1 << 22


@dataclass
class S10Result:
    N: int
    cl: int
    n2: np.ndarray          # moduli
    inner: np.ndarray       # complex full sums, one per n2
    aggregate: float        # max over N' of sum_{n2} |partial sum up to N'|
    argmax_prime: int       # the N' (a prime bound) attaining the maximum
    full_sum: float         # sum_{n2} |inner|

    @property
    def exponent(self):
        return math.log(self.aggregate) / math.log(self.N) if self.aggregate > 0 else -math.inf


def inner_sums(cl, n2s, primes, weights=None):
    """sum over primes n1 coprime to n2 of weight(n1) e(cl inv(n1) / n2), for each n2."""
    n2s = np.asarray(n2s, dtype=np.int64)
    primes = np.asarray(primes, dtype=np.int64)
    w = np.log(primes.astype(float)) if weights is None else np.asarray(weights, dtype=float)
    cum = _cumulative(cl, n2s, primes, w)
    return cum[:, -1] if primes.size else np.zeros(n2s.size, dtype=complex)


def _cumulative(cl, n2s, primes, w):
    out = np.zeros((n2s.size, primes.size), dtype=complex)
    if primes.size == 0:
        return out
    rows = max(1, _CELL_BUDGET // primes.size)
    for i in range(0, n2s.size, rows):
        n2 = n2s[i:i + rows, None]
        n1 = np.broadcast_to(primes[None, :], (n2.shape[0], primes.size))
        coprime = n2 % n1 != 0
        inv = mod_inverse_array(np.where(coprime, n1 % n2, 1), n2)
        r = (cl % n2) * inv % n2
        phase = np.exp(2j * np.pi * r / n2)
        out[i:i + rows] = np.cumsum(np.where(coprime, w[None, :] * phase, 0), axis=1)
    return out


def s10(N, cl, n2_range=None, prime_range=None, weights=None):
    """Aggregate max_{N'} sum_{n2} |sum_{N <= n1 < N', n1 prime} varpi(n1) e(cl inv(n1)/n2)|."""
    if cl == 0:
        raise UsageError("c*l must be nonzero")
    N = int(N)
    lo2, hi2 = n2_range or (N, 2 * N)        # n2 in (lo2, hi2]
    plo, phi_ = prime_range or (N, 2 * N)    # n1 in [plo, phi_)
    n2s = np.arange(lo2 + 1, hi2 + 1, dtype=np.int64)
    primes = primes_in_range(plo, phi_)
    w = np.log(primes.astype(float)) if weights is None else np.asarray(weights, dtype=float)
    if primes.size == 0 or n2s.size == 0:
        return S10Result(N, cl, n2s, np.zeros(n2s.size, dtype=complex), 0.0, plo, 0.0)
    totals = np.zeros(primes.size)
    inner = np.zeros(n2s.size, dtype=complex)
    rows = max(1, _CELL_BUDGET // primes.size)
    for i in range(0, n2s.size, rows):
        cum = _cumulative(cl, n2s[i:i + rows], primes, w)
        totals += np.abs(cum).sum(axis=0)
        inner[i:i + rows] = cum[:, -1]
    j = int(np.argmax(totals))
    return S10Result(N, cl, n2s, inner, float(totals[j]), int(primes[j]) + 1,
                     math.fsum(np.abs(inner).tolist()))


def exponent_fit(results):
    """Least-squares slope of log aggregate against log N."""
    x = np.log([r.N for r in results])
    y = np.log([r.aggregate for r in results])
    return float(np.polyfit(x, y, 1)[0])
