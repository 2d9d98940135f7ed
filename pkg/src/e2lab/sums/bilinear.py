"""Type I and Type II bilinear sums over Phi(mn), with naive-grid oracles.

Fast paths enumerate only the (m, n) with Phi(mn) > 0 through the lattice
progression kernel; oracles evaluate Phi on the full m x n grid.
"""
import math
import time

import numpy as np

from ..errors import HypothesisViolation
from ..instance import phi
from ..lattice import dyadic, phi_points
from ..parallel import chunk_ranges, pmap
from ..weight import W_HAT_0
from .report import ONE, VARPI, VARPI_MINUS_ONE, BumpWeight, SumReport

_SLACK = 1e-12
_OUTER_BLOCK = 1 << 14
_GRID_BUDGET = 1 << 22


def _params(p, M, N):
    d = p.as_dict()
    d.update(M=M, N=N)
    return d


def check_hypotheses(p, M, N, need_n_small=False):
    """Raise HypothesisViolation naming each failed size condition."""
    failed = []
    mn, x = M * N, p.x
    if mn < x / 4 * (1 - _SLACK):
        failed.append(f"x/4 <= MN (MN={mn:.6g}, x/4={x / 4:.6g})")
    if mn > 4 * x * (1 + _SLACK):
        failed.append(f"MN <= 4x (MN={mn:.6g}, 4x={4 * x:.6g})")
    lim = p.z ** (2 - p.delta)
    if M > lim * (1 + _SLACK):
        failed.append(f"M <= z^(2-delta) (M={M:.6g}, bound={lim:.6g})")
    if need_n_small and N > lim * (1 + _SLACK):
        failed.append(f"N <= z^(2-delta) (N={N:.6g}, bound={lim:.6g})")
    if failed:
        raise HypothesisViolation("hypothesis violated: " + "; ".join(failed), failed)


def type2_window(p):
    return max(p.z, p.q / p.z ** (1 - p.delta)), p.z ** (16 / 15 - p.delta)


def check_type2_window(p, N):
    lo_z, lo_q = p.z, p.q / p.z ** (1 - p.delta)
    hi = p.z ** (16 / 15 - p.delta)
    failed = []
    if N < lo_z * (1 - _SLACK):
        failed.append(f"N >= z (N={N:.6g}, z={lo_z:.6g})")
    if N < lo_q * (1 - _SLACK):
        failed.append(f"N >= q/z^(1-delta) (N={N:.6g}, bound={lo_q:.6g})")
    if N > hi * (1 + _SLACK):
        failed.append(f"N <= z^(16/15-delta) (N={N:.6g}, bound={hi:.6g})")
    if failed:
        raise HypothesisViolation("Type II window violated: " + "; ".join(failed), failed)


# --- shared kernels ------------------------------------------------------------

def _outer_blocks(m_range, n_range):
    (m_lo, m_hi), (n_lo, n_hi) = m_range, n_range
    outer = "m" if m_hi - m_lo <= n_hi - n_lo else "n"
    lo, hi = m_range if outer == "m" else n_range
    blocks = [(a - 1, b - 1) for a, b in chunk_ranges(lo + 1, hi + 1, _OUTER_BLOCK)]
    if outer == "m":
        return outer, [(b, n_range) for b in blocks]
    return outer, [(m_range, b) for b in blocks]


def _bilinear_block(args):
    p, m_range, n_range, outer, fm, fn = args
    parts = []
    for m, n, w in phi_points(p, m_range, n_range, outer):
        parts.append(math.fsum((fm.values(m) * fn.values(n) * w).tolist()))
    return math.fsum(parts)


def bilinear(p, m_range, n_range, fm, fn, workers=1):
    """sum of fm(m) fn(n) Phi(mn) over m in (m_lo, m_hi], n in (n_lo, n_hi]."""
    outer, blocks = _outer_blocks(m_range, n_range)
    parts = pmap(_bilinear_block, [(p, mr, nr, outer, fm, fn) for mr, nr in blocks], workers)
    return math.fsum(parts)


def _row_sums(p, m_range, n_range, fns):
    """Per-m sums R_f(m) = sum_n f(n) Phi(mn) for each f in fns, as arrays over m."""
    m_lo, m_hi = m_range
    out = [np.zeros(m_hi - m_lo) for _ in fns]
    for m, n, w in phi_points(p, m_range, n_range):
        idx = m - m_lo - 1
        for o, f in zip(out, fns):
            o += np.bincount(idx, weights=f.values(n) * w, minlength=m_hi - m_lo)
    return out


def naive_grid(p, m_range, n_range, fm, fn):
    """Oracle: sum fm(m) fn(n) Phi(mn) with Phi evaluated at every grid point."""
    ms = np.arange(m_range[0] + 1, m_range[1] + 1, dtype=np.int64)
    ns = np.arange(n_range[0] + 1, n_range[1] + 1, dtype=np.int64)
    if ms.size == 0 or ns.size == 0:
        return 0.0
    am, bn = fm.values(ms), fn.values(ns)
    rows = max(1, _GRID_BUDGET // ns.size)
    parts = []
    for i in range(0, ms.size, rows):
        grid = phi(ms[i:i + rows, None] * ns[None, :], p)
        parts.append(math.fsum((am[i:i + rows, None] * grid * bn[None, :]).ravel().tolist()))
    return math.fsum(parts)


def _naive_rows(p, m_range, n_range, fns):
    ms = np.arange(m_range[0] + 1, m_range[1] + 1, dtype=np.int64)
    ns = np.arange(n_range[0] + 1, n_range[1] + 1, dtype=np.int64)
    out = [np.zeros(ms.size) for _ in fns]
    vals = [f.values(ns) for f in fns]
    rows = max(1, _GRID_BUDGET // max(ns.size, 1))
    for i in range(0, ms.size, rows):
        grid = phi(ms[i:i + rows, None] * ns[None, :], p)
        for o, v in zip(out, vals):
            o[i:i + rows] = grid @ v
    return ms, out


def _fsum(a):
    return math.fsum(np.asarray(a).ravel().tolist())


# --- Type I ------------------------------------------------------------------

def type1(alpha, M, N, p, oracle=False, check=True, workers=1):
    """sum over m ~ M, n ~ N of alpha_m Phi(mn)."""
    if check:
        check_hypotheses(p, M, N)
    t0 = time.perf_counter()
    mr, nr = dyadic(M), dyadic(N)
    alpha.check(*mr)
    value = bilinear(p, mr, nr, alpha, ONE, workers)
    main = W_HAT_0 * N * p.z / p.q * _fsum(alpha.values(np.arange(mr[0] + 1, mr[1] + 1)))
    rep = SumReport("type1", value, main, _params(p, M, N), coeff=alpha.label)
    if oracle:
        rep.oracle_value = naive_grid(p, mr, nr, alpha, ONE)
    rep.wall_time = time.perf_counter() - t0
    return rep


def type1_smooth(alpha, M, N, p, oracle=False, check=True, workers=1):
    """sum over all n and m ~ M of alpha_m W(n/(3N)) Phi(mn)."""
    if check:
        check_hypotheses(p, M, N)
    t0 = time.perf_counter()
    mr = dyadic(M)
    bump = BumpWeight(N)
    nr = bump.range()
    alpha.check(*mr)
    value = bilinear(p, mr, nr, alpha, bump, workers)
    main = 3 * W_HAT_0**2 * N * p.z / p.q * _fsum(alpha.values(np.arange(mr[0] + 1, mr[1] + 1)))
    rep = SumReport("type1_smooth", value, main, _params(p, M, N), coeff=alpha.label)
    if oracle:
        rep.oracle_value = naive_grid(p, mr, nr, alpha, bump)
    rep.wall_time = time.perf_counter() - t0
    return rep


def variant_rows(beta, M, N, p):
    """(m, W(m/3M), B(m) = sum beta_n Phi(mn), Psi'(m) = sum Phi(mn)) over the support of W(m/3M)."""
    bump = BumpWeight(M)
    mr, nr = bump.range(), dyadic(N)
    B, P = _row_sums(p, mr, nr, [beta, ONE])
    ms = np.arange(mr[0] + 1, mr[1] + 1, dtype=np.int64)
    return ms, bump.values(ms), B, P


def type1_variant(beta, M, N, p, oracle=False, check=True, workers=1):
    """sum over m and n1, n2 ~ N of beta_{n1} W(m/(3M)) Phi(m n1) Phi(m n2)."""
    if check:
        check_hypotheses(p, M, N, need_n_small=True)
    t0 = time.perf_counter()
    nr = dyadic(N)
    bn = beta.check(*nr)
    _, wm, B, P = variant_rows(beta, M, N, p)
    value = _fsum(wm * B * P)
    main = 3 * N * M * W_HAT_0**3 * p.z**2 / p.q**2 * _fsum(bn)
    rep = SumReport("type1_variant", value, main, _params(p, M, N), coeff=beta.label)
    if oracle:
        rep.oracle_value = naive_triple(beta, M, N, p)
    rep.wall_time = time.perf_counter() - t0
    return rep


def naive_triple(beta, M, N, p):
    """Oracle for type1_variant: the explicit n1, n2 double sum for each m."""
    bump = BumpWeight(M)
    mr, nr = bump.range(), dyadic(N)
    ms = np.arange(mr[0] + 1, mr[1] + 1, dtype=np.int64)
    ns = np.arange(nr[0] + 1, nr[1] + 1, dtype=np.int64)
    bn, wm = beta.values(ns), bump.values(ms)
    rows = max(1, (1 << 24) // max(ns.size**2, 1))
    parts = []
    for i in range(0, ms.size, rows):
        grid = phi(ms[i:i + rows, None] * ns[None, :], p)
        cube = (bn[None, :, None] * grid[:, :, None]) * grid[:, None, :]
        parts.append(math.fsum((wm[i:i + rows] * cube.sum(axis=(1, 2))).tolist()))
    return math.fsum(parts)


# --- Type II -----------------------------------------------------------------

def type2(M, N, p, alpha=ONE, oracle=False, check=True, bypass_window=False, workers=1):
    """sum over m ~ M, n ~ N of alpha_m (varpi(n) - 1) Phi(mn); main term 0."""
    if check:
        check_hypotheses(p, M, N)
        if not bypass_window:
            check_type2_window(p, N)
    t0 = time.perf_counter()
    mr, nr = dyadic(M), dyadic(N)
    alpha.check(*mr)
    VARPI_MINUS_ONE.check(*nr)
    value = bilinear(p, mr, nr, alpha, VARPI_MINUS_ONE, workers)
    rep = SumReport("type2", value, 0.0, _params(p, M, N), coeff=alpha.label)
    if oracle:
        rep.oracle_value = naive_grid(p, mr, nr, alpha, VARPI_MINUS_ONE)
    rep.wall_time = time.perf_counter() - t0
    return rep


def s1_decompose(M, N, p, oracle=False):
    """(S1, S11, S12, S13) with S1 from beta = varpi - 1 and the pieces from (varpi, varpi), (varpi, 1), (1, 1)."""
    _, wm, Bv, B1 = variant_rows(VARPI, M, N, p)
    if oracle:
        bump = BumpWeight(M)
        _, (Bv, B1) = _naive_rows(p, bump.range(), dyadic(N), [VARPI, ONE])
    Bb = Bv - B1
    return (_fsum(wm * Bb * Bb), _fsum(wm * Bv * Bv), _fsum(wm * Bv * B1), _fsum(wm * B1 * B1))


def decomposition_error(parts):
    """Relative defect of S1 = S11 - 2 S12 + S13."""
    s1, s11, s12, s13 = parts
    combo = math.fsum([s11, -2 * s12, s13])
    return abs(s1 - combo) / max(abs(s1), abs(s11) * 1e-6, 1e-300)


def s2_sum(M, N, p):
    """Off-diagonal part of S11; asserts that distinct primes in (N, 2N] are coprime."""
    nr = dyadic(N)
    ns = np.arange(nr[0] + 1, nr[1] + 1, dtype=np.int64)
    primes = ns[VARPI.values(ns) > 0]
    g = np.gcd(primes[:, None], primes[None, :])
    off = ~np.eye(primes.size, dtype=bool)
    assert np.all(g[off] == 1), "distinct primes in the window share a factor"
    s11 = s1_decompose(M, N, p)[1]
    return s11 - diagonal_terms(M, N, p)[0]


def diagonal_terms(M, N, p):
    """(sum_n varpi^2 sum_m W Phi^2, sum_n varpi^2 sum_m W Phi): the n1 = n2 part of S11 and its majorant."""
    bump = BumpWeight(M)
    mr, nr = bump.range(), dyadic(N)
    diag, major = [], []
    for m, n, w in phi_points(p, mr, nr):
        c = VARPI.values(n) ** 2 * bump.values(m)
        diag.append(_fsum(c * w * w))
        major.append(_fsum(c * w))
    return math.fsum(diag), math.fsum(major)


def cauchy_check(M, N, p, alpha=ONE, beta=VARPI_MINUS_ONE):
    """(S^2, (sum |alpha_m|^2) * sum_{m~M} (sum_n beta_n Phi(mn))^2, M * S1)."""
    mr, nr = dyadic(M), dyadic(N)
    S = bilinear(p, mr, nr, alpha, beta)
    a2 = _fsum(alpha.values(np.arange(mr[0] + 1, mr[1] + 1)) ** 2)
    (rows,) = _row_sums(p, mr, nr, [beta])
    inner = _fsum(rows**2)
    s1 = s1_decompose(M, N, p)[0] if beta is VARPI_MINUS_ONE else None
    return S * S, a2 * inner, (None if s1 is None else (mr[1] - mr[0]) * s1)
