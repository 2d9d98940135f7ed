"""The lattices lambda(m) = {(j, k) : jq + ka = 0 (mod m)}, shortest vectors, and the
counting function Psi(m) = sum over N < n <= 2N of Phi(mn).

Phi(mn) > 0 only when mn = ka (mod q) for some k in the open support of W(./z).
For fixed m and k those n form one residue class modulo q / gcd(m, q), so Psi
is a sum over k of W(k/z) times a progression count. The same kernel
(``progression_table`` / ``phi_points``) drives every bilinear sum.
"""
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .arith import mod_inverse_array
from .errors import HypothesisViolation, UsageError
from .instance import phi
from .parallel import chunk_ranges, pmap
from .weight import W_HAT_0, w_eval

_PAIR_BUDGET = 1 << 20


# --- lattices -------------------------------------------------------------

@dataclass(frozen=True)
class Lattice2D:
    m: int
    q: int
    a: int
    basis: tuple = field(default=((1, 0), (0, 1)))

    def contains(self, v):
        j, k = v
        return (j * self.q + k * self.a) % self.m == 0

    @property
    def determinant(self):
        (j1, k1), (j2, k2) = self.basis
        return abs(j1 * k2 - j2 * k1)


@dataclass(frozen=True)
class ReducedBasis:
    b1: tuple
    b2: tuple
    r1_sq: int

    @property
    def R1(self):
        return math.sqrt(self.r1_sq)


def _norm2(v):
    return v[0] * v[0] + v[1] * v[1]


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def lambda_basis(m, q, a):
    """Hermite-form basis (m/g, 0), (t, g) with g = gcd(m, q)."""
    m, q, a = int(m), int(q), int(a)
    if m < 1:
        raise UsageError(f"m={m} must be >= 1")
    if math.gcd(a, q) != 1:
        raise UsageError(f"gcd(a, q) = {math.gcd(a, q)} != 1")
    g = math.gcd(m, q)
    mp = m // g
    # k must be a multiple of g since gcd(g, a) = 1; for k = g solve j (q/g) = -a (mod m/g)
    t = (-a * pow(q // g, -1, mp)) % mp if mp > 1 else 0
    return Lattice2D(m, q, a, ((mp, 0), (t, g)))


def gauss_reduce(L):
    """Lagrange reduction, exact in integer arithmetic."""
    u, v = L.basis
    if _norm2(u) > _norm2(v):
        u, v = v, u
    while True:
        nu = _norm2(u)
        # nearest integer to <u, v> / |u|^2
        mu = (2 * _dot(u, v) + nu) // (2 * nu)
        v = (v[0] - mu * u[0], v[1] - mu * u[1])
        if _norm2(v) >= nu:
            break
        u, v = v, u
    return ReducedBasis(u, v, _norm2(u))


def r1_squared(m, q, a):
    return gauss_reduce(lambda_basis(m, q, a)).r1_sq


def brute_force_index(m, q, a):
    """Index of lambda(m) in Z^2, from the number of lattice points in [0, m)^2."""
    j, k = np.meshgrid(np.arange(m, dtype=np.int64), np.arange(m, dtype=np.int64))
    hits = int(np.count_nonzero((j * (q % m) + k * (a % m)) % m == 0))
    return m * m // hits


def brute_force_shortest(m, q, a):
    """min |v|^2 over nonzero lattice points in the Minkowski disc."""
    r = math.isqrt(math.ceil(4 * m / math.pi)) + 1
    ax = np.arange(-r, r + 1, dtype=np.int64)
    j, k = np.meshgrid(ax, ax)
    on = ((j * (q % m) + k * (a % m)) % m == 0) & ((j != 0) | (k != 0))
    return int(np.min(j[on] ** 2 + k[on] ** 2))


def level_distribution(M, q, a):
    """Counter l -> #{m <= M : R1(m)^2 = l}."""
    return Counter(r1_squared(m, q, a) for m in range(1, int(M) + 1))


def level_count(M, l, q, a):
    if l <= 0:
        return 0
    return level_distribution(M, q, a).get(l, 0)


# --- the progression kernel ------------------------------------------------

def support_ks(p):
    """Integers k with W(k/z) > 0, and those weights."""
    ks = np.arange(math.ceil(p.z / 4), math.floor(3 * p.z / 4) + 1, dtype=np.int64)
    w = np.atleast_1d(w_eval(ks / p.z))
    keep = w > 0
    return ks[keep], w[keep]


def dyadic(N):
    """Integer bounds (lo, hi] of the range N < n <= 2N."""
    return math.floor(N), math.floor(2 * N)


def progression_table(us, v_lo, v_hi, p, ks):
    """For outer values u and support k, the v in (v_lo, v_hi] with uv = ka (mod q).

    They form the class v = r (mod L), L = q / gcd(u, q), provided gcd(u, q) | k.
    Returns (first, count, L): first solution above v_lo and number of solutions,
    both shaped (len(us), len(ks)).
    """
    if p.q >= 1 << 31:
        raise UsageError("progression kernel needs q < 2**31")
    us = np.asarray(us, dtype=np.int64)
    q = p.q
    g = np.gcd(us % q, q)
    L = q // g
    inv = mod_inverse_array((us // g) % L, L)
    Lc, gc = L[:, None], g[:, None]
    valid = ks[None, :] % gc == 0
    r = ((ks[None, :] // gc) % Lc) * (p.a % Lc) % Lc * inv[:, None] % Lc
    first = v_lo + 1 + (r - v_lo - 1) % Lc
    count = np.where(valid & (first <= v_hi), (v_hi - first) // Lc + 1, 0)
    return first, count, L


def _expand(first, count, L):
    flat = count.ravel()
    total = int(flat.sum())
    pair = np.repeat(np.arange(flat.size), flat)
    starts = np.cumsum(flat) - flat
    offs = np.arange(total, dtype=np.int64) - np.repeat(starts, flat)
    nk = count.shape[1]
    iu, ik = pair // nk, pair % nk
    return iu, ik, first.ravel()[pair] + offs * L[iu]


def phi_points(p, m_range, n_range, outer=None):
    """Yield (m, n, Phi(mn)) for all m in (m_lo, m_hi], n in (n_lo, n_hi] with Phi(mn) > 0.

    Chunks come in a fixed order. ``outer`` ("m" or "n") picks the variable
    iterated explicitly; by default the shorter range.
    """
    (m_lo, m_hi), (n_lo, n_hi) = m_range, n_range
    if outer is None:
        outer = "m" if m_hi - m_lo <= n_hi - n_lo else "n"
    (u_lo, u_hi), (v_lo, v_hi) = ((m_range, n_range) if outer == "m" else (n_range, m_range))
    ks, wk = support_ks(p)
    if ks.size == 0 or u_hi <= u_lo or v_hi <= v_lo:
        return
    rows = max(1, _PAIR_BUDGET // ks.size)
    for a, b in chunk_ranges(u_lo + 1, u_hi + 1, rows):
        us = np.arange(a, b, dtype=np.int64)
        first, count, L = progression_table(us, v_lo, v_hi, p, ks)
        iu, ik, v = _expand(first, count, L)
        if v.size == 0:
            continue
        u = us[iu]
        if outer == "m":
            yield u, v, wk[ik]
        else:
            yield v, u, wk[ik]


# --- Psi ----------------------------------------------------------------------

def psi_array(ms, p, N):
    """Psi(m) for every m in ``ms``."""
    ms = np.atleast_1d(np.asarray(ms, dtype=np.int64))
    lo, hi = dyadic(N)
    ks, wk = support_ks(p)
    out = np.zeros(ms.size)
    if ks.size == 0:
        return out
    rows = max(1, _PAIR_BUDGET // ks.size)
    for a in range(0, ms.size, rows):
        _, count, _ = progression_table(ms[a:a + rows], lo, hi, p, ks)
        out[a:a + rows] = (count * wk[None, :]).sum(axis=1)
    return out


def psi(m, p, N):
    return float(psi_array([m], p, N)[0])


def psi_naive(m, p, N):
    """Direct sum of Phi(mn) over N < n <= 2N."""
    lo, hi = dyadic(N)
    n = np.arange(lo + 1, hi + 1, dtype=np.int64)
    return math.fsum(np.atleast_1d(phi(int(m) * n, p)).tolist())


def psi_main_term(p, N):
    return N * W_HAT_0 * p.z / p.q


def psi1(m, p, N):
    return psi(m, p, N) - psi_main_term(p, N)


def _moment_chunk(args):
    a, b, p, N = args
    vals = psi_array(np.arange(a, b, dtype=np.int64), p, N)
    dev = vals - psi_main_term(p, N)
    return math.fsum((vals * vals).tolist()), math.fsum((dev * dev).tolist())


def moment_sums(M, p, N, workers=1, check=True):
    """(sum Psi(m)^2, sum Psi1(m)^2) over M < m <= 2M."""
    limit = p.z ** (2 - p.delta)
    if check and M > limit:
        raise HypothesisViolation(f"M <= z^(2-delta) fails: M={M} > {limit:.6g}", ["M <= z^(2-delta)"])
    lo, hi = dyadic(M)
    parts = pmap(_moment_chunk, [(a, b, p, N) for a, b in chunk_ranges(lo + 1, hi + 1)], workers)
    return math.fsum(s for s, _ in parts), math.fsum(s for _, s in parts)
