"""The admissible Type II range of N and the truncation radii for (j, k, l)."""
import math
from fractions import Fraction

import numpy as np

from ..errors import AdmissibilityError
from ..instance import as_fraction
from ..weight import T_MAX, default_table

TAU_LIMIT = Fraction(8, 23)  # 1 / (3 - 1/8)
DEFAULT_ETA = 0.05


def check_tau(tau):
    """Exact test tau < 8/23; raises AdmissibilityError otherwise."""
    t = as_fraction(tau)
    if not t < TAU_LIMIT:
        raise AdmissibilityError(f"tau = {t} ({float(t):.6g}) is not < 8/23 ({float(TAU_LIMIT):.6g}): "
                                 "the Type II range of N would be empty")
    return t


def admissible_window(tau, p):
    """(N_low, N_high) = (max(z, q/z^(1-delta)), z^(16/15-delta)), or AdmissibilityError."""
    check_tau(tau)
    lo_z, lo_q = p.z, p.q / p.z ** (1 - p.delta)
    hi = p.z ** (16 / 15 - p.delta)
    lo = max(lo_z, lo_q)
    if lo > hi:
        which = "z" if lo_z >= lo_q else "q/z^(1-delta)"
        raise AdmissibilityError(f"empty N window: {which} = {lo:.6g} > z^(16/15-delta) = {hi:.6g}")
    return lo, hi


def window_centre(p):
    lo, hi = admissible_window(p.tau, p)
    return math.sqrt(lo * hi)


def truncation_ranges(eta, N, M, p):
    """(l_max, k_max, j_max) = (8Nz/q, q z^eta / M, N z^(2 eta - 1))."""
    if eta < 0:
        raise ValueError("eta must be >= 0")
    z, q = p.z, p.q
    return 8 * N * z / q, q * z**eta / M, N * z ** (2 * eta - 1)


def truncation_tail(eta, N, M, p, n1=None, n2=None, t=0.0):
    """Mass of the (j, k) double sum of |What(3Mk/q) What((jq - ka - t n1) z/(n2 q))| outside
    |k| < k_max, |j| < j_max, relative to the mass inside.

    Both factors are cut at |argument| <= T_MAX, past which What is below 1e-13.
    """
    n1 = n1 or int(N) + 1
    n2 = n2 or int(N) + 1
    _, k_max, j_max = truncation_ranges(eta, N, M, p)
    q, z, a = p.q, p.z, p.a
    T = T_MAX
    prof = default_table().profile
    K = int(math.ceil(T * q / (3 * M)))
    k = np.arange(-K, K + 1)
    wk = np.abs(prof(3 * M * k / q))
    inside_k = np.abs(k) < k_max
    inside, outside = [], []
    v = z / n2
    for kk, w, ink in zip(k, wk, inside_k):
        if w < 1e-16:
            continue
        u0 = -(kk * a + t * n1) * z / (n2 * q)
        j = np.arange(math.ceil((-T - u0) / v), math.floor((T - u0) / v) + 1)
        wj = np.abs(prof(j * v + u0)) * w
        inj = np.abs(j) < j_max
        if ink:
            inside.append(math.fsum(wj[inj].tolist()))
            outside.append(math.fsum(wj[~inj].tolist()))
        else:
            outside.append(math.fsum(wj.tolist()))
    tot_in = math.fsum(inside)
    return math.fsum(outside) / tot_in if tot_in else math.inf
