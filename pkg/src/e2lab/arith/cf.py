"""Exactly described irrationals, continued fractions and distances to the nearest integer.

Every irrational here can produce a rational enclosing interval of any
requested width, so threshold comparisons are either decided exactly or raise
:class:`PrecisionExhausted`.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import count as _count

import mpmath

from ..errors import PrecisionExhausted, UsageError

MIN_BITS = 128
MAX_BITS = 1 << 14


@dataclass(frozen=True)
class Convergent:
    numerator: int
    denominator: int
    index: int

    @property
    def value(self):
        return Fraction(self.numerator, self.denominator)


def nearest_int_distance(x):
    """‖x‖, the distance from x to the nearest integer, in the type of x."""
    if isinstance(x, mpmath.mpf):
        d = x - mpmath.floor(x)
    else:
        d = x - math.floor(x)
    return min(d, 1 - d)


def _floor_div_interval(lo, hi):
    a, b = math.floor(lo), math.floor(hi)
    if a != b:
        raise PrecisionExhausted(f"interval [{float(lo)}, {float(hi)}] straddles an integer")
    return a


class Irrational:
    """Base: subclasses provide ``interval(bits)`` and ``partial_quotients(count)``."""

    name = "alpha"

    def interval(self, bits=MIN_BITS):
        raise NotImplementedError

    def partial_quotients(self, count):
        # generic route: peel quotients off a rational enclosure, refining as needed
        bits = MIN_BITS
        while True:
            lo, hi = self.interval(bits)
            try:
                return _quotients_from_interval(lo, hi, count)
            except PrecisionExhausted:
                if bits >= MAX_BITS:
                    raise
                bits *= 2

    def mp(self, prec):
        lo, hi = self.interval(prec + 8)
        with mpmath.workprec(prec):
            return mpmath.mpf(lo.numerator) / lo.denominator


def _quotients_from_interval(lo, hi, count):
    out = []
    for _ in range(count):
        a = _floor_div_interval(lo, hi)
        out.append(a)
        flo, fhi = lo - a, hi - a
        if flo <= 0:
            raise PrecisionExhausted("fractional part not bounded away from zero")
        lo, hi = 1 / fhi, 1 / flo
    return out


class QuadraticSurd(Irrational):
    """alpha = (P + sqrt(D)) / Q with D > 0 not a perfect square."""

    def __init__(self, P, D, Q, name=None):
        if D <= 0 or math.isqrt(D) ** 2 == D:
            raise UsageError(f"D={D} must be a positive non-square")
        if Q == 0:
            raise UsageError("Q must be nonzero")
        self.P, self.D, self.Q = int(P), int(D), int(Q)
        self.name = name or f"({P}+sqrt({D}))/{Q}"

    def scaled(self, n):
        """The surd n*alpha."""
        return QuadraticSurd(n * self.P, n * n * self.D, self.Q, name=f"{n}*{self.name}")

    def floor(self):
        s = math.isqrt(self.D)
        if self.Q > 0:
            return (self.P + s) // self.Q
        # Q < 0: (P + sqrt D)/Q is floor((-P - sqrt D)/|Q|); -sqrt D lies in (-s-1, -s)
        return (-self.P - s - 1) // (-self.Q)

    def interval(self, bits=MIN_BITS):
        scale = 1 << bits
        r = math.isqrt(self.D * scale * scale)
        lo = Fraction(self.P * scale + r, scale * self.Q)
        hi = Fraction(self.P * scale + r + 1, scale * self.Q)
        return (lo, hi) if lo <= hi else (hi, lo)

    def partial_quotients(self, count):
        P, D, Q = self.P, self.D, self.Q
        if (D - P * P) % Q:
            # rescale so that Q divides D - P^2
            P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
        s = math.isqrt(D)
        out = []
        for _ in range(count):
            a = (P + s) // Q if Q > 0 else (P + s + 1) // Q
            out.append(a)
            P = a * Q - P
            Q = (D - P * P) // Q
        return out

    def mp(self, prec):
        with mpmath.workprec(prec):
            return (self.P + mpmath.sqrt(self.D)) / self.Q


class ContinuedFraction(Irrational):
    """An irrational given by its partial quotients: a finite list (exhaustible) or a callable i -> a_i."""

    def __init__(self, quotients, name="cf"):
        self._q = quotients
        self.name = name

    def quotient(self, i):
        if callable(self._q):
            return self._q(i)
        if i >= len(self._q):
            raise PrecisionExhausted(f"only {len(self._q)} partial quotients available")
        return self._q[i]

    @property
    def finite(self):
        return not callable(self._q)

    def partial_quotients(self, count):
        if self.finite:
            # a finite expansion is a rational: it has no further quotients
            return list(self._q[:count])
        return [self.quotient(i) for i in range(count)]

    def interval(self, bits=MIN_BITS):
        target = Fraction(1, 1 << bits)
        p0, q0, p1, q1 = 1, 0, self.quotient(0), 1
        for i in _count(1):
            if self.finite and i >= len(self._q):
                return Fraction(p1, q1), Fraction(p1, q1)
            a = self.quotient(i)
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
            # alpha lies strictly between consecutive convergents
            lo, hi = sorted((Fraction(p0, q0), Fraction(p1, q1)))
            if hi - lo <= target:
                return lo, hi


class IntervalReal(Irrational):
    """A real known only through a fixed rational enclosure [lo, hi]."""

    def __init__(self, lo, hi, name="interval"):
        self.lo, self.hi = Fraction(lo), Fraction(hi)
        if self.lo > self.hi:
            raise UsageError("empty interval")
        self.name = name

    def interval(self, bits=MIN_BITS):
        # fixed enclosure: callers refining ``bits`` eventually hit PrecisionExhausted
        return self.lo, self.hi

    def partial_quotients(self, count):
        return _quotients_from_interval(self.lo, self.hi, count)


def _e_quotient(i):
    if i == 0:
        return 2
    return 2 * (i + 1) // 3 if i % 3 == 2 else 1


SQRT2 = QuadraticSurd(0, 2, 1, name="sqrt2")
PHI = QuadraticSurd(1, 5, 2, name="phi")
E = ContinuedFraction(_e_quotient, name="e")
NAMED = {"sqrt2": SQRT2, "phi": PHI, "e": E}


def convergents_from_quotients(quotients):
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    for i, a in enumerate(quotients):
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append(Convergent(p1, q1, i))
    return out


def convergents(alpha, count):
    """The first ``count`` continued-fraction convergents of alpha."""
    if count <= 0:
        return []
    return convergents_from_quotients(alpha.partial_quotients(count))


def convergents_in_range(alpha, qmin, qmax, limit=200):
    """Convergents with qmin <= denominator <= qmax."""
    out = []
    for k in range(1, limit + 1):
        cs = convergents(alpha, k)
        if len(cs) < k:
            break
        c = cs[-1]
        if c.denominator > qmax:
            break
        if c.denominator >= qmin and (not out or out[-1].denominator != c.denominator):
            out.append(c)
    return out


def distance_interval(alpha, n, bits=MIN_BITS):
    """Rational enclosure of ‖n·alpha‖ of width at most about 2**-bits."""
    if isinstance(alpha, QuadraticSurd):
        lo, hi = alpha.scaled(n).interval(bits)
    else:
        lo, hi = alpha.interval(bits + max(int(n).bit_length(), 1))
        lo, hi = n * lo, n * hi
    width = hi - lo
    d = nearest_int_distance(lo)
    # ‖.‖ is 1-Lipschitz
    return max(d - width, Fraction(0)), d + width


def certify_distance_bound(alpha, n, tau):
    """Decide ‖n·alpha‖ <= n**(-tau) exactly (tau rational).

    Returns (verdict, (lo, hi)) where (lo, hi) encloses ‖n·alpha‖.
    """
    tau = Fraction(tau)
    num, den = tau.numerator, tau.denominator
    bits = MIN_BITS
    while bits <= MAX_BITS:
        lo, hi = distance_interval(alpha, n, bits)
        # d <= n^(-num/den)  <=>  d^den * n^num <= 1
        if hi**den * n**num <= 1:
            return True, (lo, hi)
        if lo**den * n**num > 1:
            return False, (lo, hi)
        bits *= 2
    raise PrecisionExhausted(f"cannot decide ‖{n}·{alpha.name}‖ against {n}^-{tau}")
