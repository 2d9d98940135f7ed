"""Fourier-side quantities of the Type II analysis.

T(n1, n2)   = sum_m W(m/3M) Phi(m n1) Phi(m n2) and its Poisson-dual form
F(n1, n2; c) = sum over k1 n1 + k2 n2 = c of What(k1 z/q) What(k2 z/q)
g(t)        = What(t z/q) What((c - t n1) z/(n2 q)), with transform ghat
h(n1, n2)   = ghat(l / n2)

ghat is computed from the convolution of the two compactly supported
transforms. With a change of variable xi = x q / z it reads

    ghat(t) = rho * int W(-xi) W(rho t - r xi) e(-c (t - z xi / q) / n1) dxi,
    rho = n2 q / (n1 z),  r = n2 / n1,

an integral over the finite overlap of two bumps.
"""
import math

import numpy as np

from ..errors import NonCoprimeError, TruncationError
from ..instance import phi
from ..lattice import phi_points
from ..parallel import fsum_complex
from ..weight import T_MAX, default_table, gl_nodes, w_deriv, w_eval, w_hat_array
from .report import BumpWeight

_BREAKS = (0.25, 1 / 3, 2 / 3, 0.75)
_ORDER = 20


def _e(x):
    return np.exp(2j * np.pi * x)


def _csum(a):
    a = np.asarray(a).ravel()
    return fsum_complex(a.tolist()) if a.size else 0j


# --- T -----------------------------------------------------------------------

def harmonic_T_direct(M, n1, n2, p):
    """sum_m W(m/3M) Phi(m n1) Phi(m n2), visiting only m with Phi(m n1) > 0."""
    bump = BumpWeight(M)
    total = []
    for m, _, w in phi_points(p, bump.range(), (n1 - 1, n1), outer="n"):
        total.append(math.fsum((bump.values(m) * w * np.atleast_1d(phi(m * n2, p))).tolist()))
    return math.fsum(total)


def harmonic_T_naive(M, n1, n2, p):
    bump = BumpWeight(M)
    lo, hi = bump.range()
    m = np.arange(lo + 1, hi + 1, dtype=np.int64)
    return math.fsum((bump.values(m) * phi(m * n1, p) * phi(m * n2, p)).tolist())


def _tail_integral(t0, table):
    """int_{t0}^inf |What|, from the tabulated profile (zero beyond the table)."""
    sel = table.grid >= t0
    if not np.any(sel):
        return table.tail
    return float(np.trapezoid(np.abs(table.values[sel]), table.grid[sel])) + table.tail


def harmonic_T(M, n1, n2, p, truncation=T_MAX, budget=1e-6):
    """(direct, poisson) for T. The dual k-sums run over |k z/q| <= truncation.

    Raises TruncationError when the estimated neglected mass exceeds ``budget``.
    """
    if math.gcd(n1, n2) != 1:
        raise NonCoprimeError(f"gcd(n1, n2) = {math.gcd(n1, n2)} != 1")
    direct = harmonic_T_direct(M, n1, n2, p)
    table = default_table()
    q, z = p.q, p.z
    K = int(math.floor(truncation * q / z))
    k = np.arange(-K, K + 1, dtype=np.int64)
    wk = table(k * z / q)
    # residue of a_inv k n_i mod q labels the phase e(m a_inv k n_i / q)
    ka = (k % q) * p.a_inv % q
    H = []
    for n in (n1, n2):
        s = ka * (n % q) % q
        H.append(np.bincount(s, weights=wk.real, minlength=q) + 1j * np.bincount(s, weights=wk.imag, minlength=q))
    conv = np.fft.ifft(np.fft.fft(H[0]) * np.fft.fft(H[1]))
    R = int(math.ceil(truncation / (3 * M))) + 1
    s = np.arange(q)
    G = np.zeros(q, dtype=complex)
    for m in range(-R, R + 2):
        G += table(3 * M * (m - s / q))
    pref = 3 * M * z * z / (q * q)
    poisson = pref * _csum(conv * G)
    eps = 2 * (q / z) * _tail_integral(truncation, table)
    mass = float(np.sum(np.abs(wk)))
    err = pref * float(np.max(np.abs(G))) * (2 * mass * eps + eps * eps)
    if err > budget:
        raise TruncationError(f"dual truncation at {truncation} leaves ~{err:.3g} > budget {budget:.3g}")
    return direct, poisson.real


# --- F and ghat ----------------------------------------------------------------

def F_eval(n1, n2, c, p, mode="direct", truncation=T_MAX):
    """F(n1, n2; c), summing over k1 = c * inv(n1) (mod n2) or by Poisson in k1."""
    if math.gcd(n1, n2) != 1:
        raise NonCoprimeError(f"gcd(n1, n2) = {math.gcd(n1, n2)} != 1")
    q, z = p.q, p.z
    r = c * pow(n1, -1, n2) % n2 if n2 > 1 else 0
    if mode == "direct":
        K = truncation * q / z
        j = np.arange(math.ceil((-K - r) / n2), math.floor((K - r) / n2) + 1, dtype=np.int64)
        k1 = r + n2 * j
        k2 = (c - k1 * n1) // n2  # exact: n2 divides c - k1 n1
        vals = w_hat_array(k1 * z / q) * w_hat_array(k2 * z / q)
        return _csum(vals)
    if mode == "poisson":
        L = int(math.ceil(4 * z * n2 / q))
        ls = np.arange(-L, L + 1)
        gh = np.array([g_hat(l / n2, n1, n2, c, p) for l in ls])
        return _csum(gh * _e(r * ls / n2)) / n2
    raise ValueError(f"unknown mode {mode!r}")


def F_naive(n1, n2, c, p, truncation=T_MAX):
    """Oracle: scan every k1 with |k1 z/q| <= truncation and keep those with n2 | c - k1 n1."""
    K = int(math.floor(truncation * p.q / p.z))
    k1 = np.arange(-K, K + 1, dtype=np.int64)
    k1 = k1[(c - k1 * n1) % n2 == 0]
    k2 = (c - k1 * n1) // n2
    return _csum(w_hat_array(k1 * p.z / p.q) * w_hat_array(k2 * p.z / p.q))


def _overlap_nodes(t, n1, n2, c, p):
    q, z = p.q, p.z
    rho, rr = n2 * q / (n1 * z), n2 / n1
    lo = max(-0.75, (rho * t - 0.75) / rr)
    hi = min(-0.25, (rho * t - 0.25) / rr)
    if not lo < hi:
        return None
    cuts = {lo, hi}
    for b in _BREAKS:
        for xi in (-b, (rho * t - b) / rr):
            if lo < xi < hi:
                cuts.add(xi)
    cuts = sorted(cuts)
    freq = abs(c) * z / (q * n1)
    xs, ws = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        panels = max(4, int(math.ceil(2 * freq * (b - a))))
        x, w = gl_nodes(a, b, panels, _ORDER)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws), rho, rr


def g_hat(t, n1, n2, c, p):
    """Transform of g(.; n1, n2, c) at t; exactly 0 when the two bumps do not overlap."""
    nodes = _overlap_nodes(t, n1, n2, c, p)
    if nodes is None:
        return 0j
    xi, w, rho, rr = nodes
    f = w_eval(-xi) * w_eval(rho * t - rr * xi) * _e(-c * (t - p.z * xi / p.q) / n1)
    return complex(rho * np.sum(f * w))


def g_hat_n1_derivative(t, n1, n2, c, p):
    """d ghat / d n1 at fixed t, differentiating under the integral."""
    nodes = _overlap_nodes(t, n1, n2, c, p)
    if nodes is None:
        return 0j
    xi, w, rho, rr = nodes
    arg = rho * t - rr * xi
    u = t - p.z * xi / p.q
    E = _e(-c * u / n1)
    W1, W2, dW2 = w_eval(-xi), w_eval(arg), w_deriv(arg)
    f = rho * W1 * E * (-W2 / n1 - dW2 * arg / n1 + W2 * 2j * np.pi * c * u / n1**2)
    return complex(np.sum(f * w))


def g_direct(s, n1, n2, c, p, table=None):
    s = np.asarray(s, dtype=float)
    wh = w_hat_array if table is None else table
    return wh(s * p.z / p.q) * wh((c - s * n1) * p.z / (n2 * p.q))


def g_hat_direct(t, n1, n2, c, p, t_max=T_MAX, exact=False):
    """Oracle: int g(s) e(-ts) ds by composite Gauss-Legendre over |s z/q| <= t_max."""
    q, z = p.q, p.z
    S = t_max * q / z
    # fastest oscillation, in cycles per unit s
    freq = (z / q) * (0.75 + 0.75 * n1 / n2) + abs(t)
    panels = int(math.ceil(2 * S * freq)) + 16
    s, w = gl_nodes(-S, S, panels, 16)
    vals = g_direct(s, n1, n2, c, p, table=None if exact else default_table()) * _e(-t * s)
    return _csum(vals * w)


# --- the zero sum --------------------------------------------------------------

def zerosum_check(t, k, n1, n2, p, j_truncation=None):
    """|sum_j What((jq - ka - t n1) z / (n2 q))| over the j with |argument| <= T_MAX."""
    v = p.z / n2
    u0 = -(k * p.a + t * n1) * p.z / (n2 * p.q)
    T = T_MAX if j_truncation is None else j_truncation
    j = np.arange(math.ceil((-T - u0) / v), math.floor((T - u0) / v) + 1)
    return abs(_csum(w_hat_array(j * v + u0)))


# --- h ---------------------------------------------------------------------------

def h_weight(n1, n2, l, c, p):
    return g_hat(l / n2, n1, n2, c, p)


def h_n1_derivative_fd(n1, n2, l, c, p, rel_step=1e-3):
    """Five-point central difference of h in n1 (n1 treated as real)."""
    h = rel_step * n1
    f = lambda x: g_hat(l / n2, x, n2, c, p)
    return (-f(n1 + 2 * h) + 8 * f(n1 + h) - 8 * f(n1 - h) + f(n1 - 2 * h)) / (12 * h)


def h_n1_derivative(n1, n2, l, c, p):
    return g_hat_n1_derivative(l / n2, n1, n2, c, p)


def _sample_pair(rng, N):
    lo, hi = int(N) + 1, int(2 * N)
    while True:
        n1, n2 = rng.randint(lo, hi), rng.randint(lo, hi)
        if math.gcd(n1, n2) == 1:
            return n1, n2


def sample_outer(p, N, M, eta, rng):
    """Random (n1, n2, l, c) inside the truncated ranges; c = jq - ka != 0."""
    from .window import truncation_ranges

    l_max, k_max, j_max = truncation_ranges(eta, N, M, p)
    n1, n2 = _sample_pair(rng, N)
    L = max(1, math.ceil(l_max) - 1)
    l = rng.choice([-1, 1]) * rng.randint(1, L)
    J, K = max(0, math.ceil(j_max) - 1), max(0, math.ceil(k_max) - 1)
    while True:
        j, k = rng.randint(-J, J), rng.randint(-K, K)
        c = j * p.q - k * p.a
        if c:
            return n1, n2, l, c


def g_hat_bound(p, N, samples=50, seed=0):
    """Fitted C with |ghat(t)| <= C q/z over random t in (-4z/q, 4z/q) and n1, n2 ~ N."""
    import random

    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        n1, n2 = _sample_pair(rng, N)
        t = rng.uniform(-4, 4) * p.z / p.q
        c = rng.randint(-p.q, p.q)
        worst = max(worst, abs(g_hat(t, n1, n2, c, p)))
    return worst * p.z / p.q


def h_derivative_bound(p, N, M, eta=0.05, samples=50, seed=0):
    """Fitted (C, C') with |h| <= C q/z and |dh/dn1| <= C' q / (N z^(1-eta))."""
    import random

    rng = random.Random(seed)
    h_max = d_max = 0.0
    for _ in range(samples):
        n1, n2, l, c = sample_outer(p, N, M, eta, rng)
        h_max = max(h_max, abs(h_weight(n1, n2, l, c, p)))
        d_max = max(d_max, abs(h_n1_derivative(n1, n2, l, c, p)))
    return h_max * p.z / p.q, d_max * N * p.z ** (1 - eta) / p.q
