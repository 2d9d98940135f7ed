"""Two applications: semiprimes n with ||n alpha|| <= n^-tau, and 3-digit palindromes in base b.

For a convergent c/q of alpha the instance a = inv(c) mod q puts every member
n = ak (mod q) of A close to a multiple of 1/q after scaling by c/q, so A is a
good hunting ground. Every candidate is then certified individually with
exact rational intervals.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .arith import (certify_distance_bound, convergents_in_range, distance_interval, factorize, is_e2,
                    omega2_mask)
from .arith.cf import nearest_int_distance
from .errors import CeilingExceeded, UsageError
from .instance import ENUMERATION_CEILING, b_instance, derive_params, enumerate_A, members
from .parallel import pmap
from .sums.window import check_tau

VERIFY_BITS = 256


@dataclass(frozen=True)
class DiophantineSolution:
    n: int
    factor_pair: tuple
    distance: object          # mpmath mpf, ||n alpha||
    bound: object             # mpmath mpf, n^-tau
    q: int                    # denominator of the convergent whose instance produced n
    enclosure: tuple = field(default=(None, None), compare=False)  # exact rational bounds on the distance

    def row(self):
        return {"n": self.n, "p1": self.factor_pair[0], "p2": self.factor_pair[1], "q_of_convergent": self.q,
                "distance": mpmath.nstr(self.distance, 17), "bound": mpmath.nstr(self.bound, 17)}


@dataclass
class DiophSearch:
    solutions: list
    near_misses: list
    instances: list


def dioph_instance(conv, tau):
    """InstanceParams for the convergent c/q: x = q^(2/(1+tau)), z = x/q, a = inv(c) mod q."""
    q, c = conv.denominator, conv.numerator
    x = q ** (2 / (1 + float(tau)))
    return derive_params(tau, q, pow(c, -1, q), z=x / q, x=x)


def _mp_value(n, tau, bits):
    with mpmath.workprec(bits):
        return mpmath.mpf(n) ** (-mpmath.mpf(tau.numerator) / tau.denominator)


def verify_solution(alpha, sol, tau, bits=VERIFY_BITS):
    """Independent check of ||n alpha|| <= n^-tau in plain mpmath at ``bits`` bits."""
    tau = Fraction(tau)
    with mpmath.workprec(bits):
        d = nearest_int_distance(sol.n * alpha.mp(bits))
        return bool(d <= _mp_value(sol.n, tau, bits))


def _within_factor(alpha, n, tau, factor):
    """True if certainly ||n alpha|| <= factor * n^-tau (factor rational)."""
    lo, hi = distance_interval(alpha, n)
    f = Fraction(factor)
    return (hi / f) ** tau.denominator * n**tau.numerator <= 1


def _search_one(args):
    alpha, conv, tau, ceiling, near_factor = args
    p = dioph_instance(conv, tau)
    sols, near = [], []
    for block in enumerate_A(p, ceiling):
        for n in block[omega2_mask(block)].tolist():
            ok, (lo, hi) = certify_distance_bound(alpha, n, tau)
            if ok:
                f = factorize(n)
                pair = tuple(f.primes())
                with mpmath.workprec(VERIFY_BITS):
                    d = mpmath.mpf(lo.numerator) / lo.denominator
                sols.append(DiophantineSolution(n, pair, d, _mp_value(n, tau, VERIFY_BITS), conv.denominator, (lo, hi)))
            elif near_factor and _within_factor(alpha, n, tau, near_factor):
                near.append(n)
    return p, sols, near


def dioph_search(alpha, tau, qmin, qmax, ceiling=ENUMERATION_CEILING, near_factor=2, workers=1):
    tau = check_tau(tau)
    convs = [c for c in convergents_in_range(alpha, qmin, qmax) if c.denominator > 16]
    results = pmap(_search_one, [(alpha, c, tau, ceiling, near_factor) for c in convs], workers)
    sols = sorted((s for _, ss, _ in results for s in ss), key=lambda s: (s.n, s.q))
    near = sorted({n for _, _, nn in results for n in nn})
    return DiophSearch(sols, near, [p for p, _, _ in results])


def dioph_solve(alpha, tau, qmin, qmax, ceiling=ENUMERATION_CEILING, workers=1):
    """Certified semiprime solutions from the convergents with qmin <= q <= qmax, ascending in n."""
    return dioph_search(alpha, tau, qmin, qmax, ceiling, near_factor=None, workers=workers).solutions


# --- palindromes -----------------------------------------------------------------

def palindrome_array(b):
    """All j(b^2+1) + kb, 0 < j < b, 0 <= k < b, ascending."""
    if b < 2:
        raise UsageError(f"base b={b} must be >= 2")
    j = np.arange(1, b, dtype=np.int64)
    k = np.arange(b, dtype=np.int64)
    return (j[:, None] * (b * b + 1) + k[None, :] * b).ravel()


def palindrome_members(b):
    yield from palindrome_array(b).tolist()


def digits(n, b):
    out = []
    while n:
        n, r = divmod(n, b)
        out.append(r)
    return out[::-1]


def palindromes_brute(b):
    """3-digit base-b palindromes found by reversing digit strings."""
    return [n for n in range(b * b, b**3) if (d := digits(n, b)) == d[::-1]]


def palindrome_e2_count(b, ceiling=ENUMERATION_CEILING, cross_check=False):
    """(count, count log b / b^2); with ``cross_check`` also whether the matching A sits inside."""
    if b**3 > ceiling:
        raise CeilingExceeded(f"b^3 = {b**3} exceeds ceiling {ceiling}")
    vals = palindrome_array(b)
    count = int(np.count_nonzero(omega2_mask(vals)))
    ratio = count * math.log(b) / b**2
    if not cross_check:
        return count, ratio
    return count, ratio, a_inside_palindromes(b)


def a_inside_palindromes(b):
    """Check that the instance q = b^2+1, z = b, x = b^3, a = b has A within the palindromes."""
    A = members(b_instance(b))
    return bool(np.all(np.isin(A, palindrome_array(b))))


def palindrome_e2_brute(b):
    return sum(1 for n in palindromes_brute(b) if is_e2(n))
