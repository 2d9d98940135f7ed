"""The smooth bump W and its Fourier transform.

W vanishes outside [1/4, 3/4], equals 1 on [1/3, 2/3], and rises/falls through
the transition T(u) = psi(u) / (psi(u) + psi(1-u)), psi(t) = exp(-1/t). It is
symmetric about 1/2, so

    What(t) = e(-t/2) * R(t),   R(t) = integral of W(1/2 + s) cos(2 pi s t) ds,

with R real and even. Everything below computes R and restores the phase.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import QuadratureError

SUPPORT = (0.25, 0.75)
PLATEAU = (1 / 3, 2 / 3)
RAMP = 12.0  # 1 / (1/3 - 1/4)
W_HAT_0 = 5 / 12

# |What(t)| < 1e-13 beyond this abscissa (decay ~ exp(-2 sqrt(pi t / 6)))
T_MAX = 500.0

_GL_PANELS = 32
_GL_ORDER = 24


def transition(u):
    """T(u): 0 for u <= 0, 1 for u >= 1, smooth in between."""
    u = np.asarray(u, dtype=float)
    inside = (u > 0) & (u < 1)
    uu = np.where(inside, u, 0.5)
    # T = 1 / (1 + exp(1/u - 1/(1-u))); exp overflow to inf gives the right limit 0
    with np.errstate(over="ignore"):
        out = 1.0 / (1.0 + np.exp(1.0 / uu - 1.0 / (1.0 - uu)))
    return np.where(inside, out, np.where(u >= 1, 1.0, 0.0))


def transition_deriv(u):
    u = np.asarray(u, dtype=float)
    inside = (u > 0) & (u < 1)
    uu = np.where(inside, u, 0.5)
    f = 1.0 / uu - 1.0 / (1.0 - uu)
    fp = -1.0 / uu**2 - 1.0 / (1.0 - uu) ** 2
    # -fp e^f / (1 + e^f)^2, written to stay finite for large |f|
    ef = np.exp(-np.abs(f))
    out = -fp * ef / (1.0 + ef) ** 2
    return np.where(inside, out, 0.0)


def w_eval(x):
    """W(x), vectorised. Exactly 0 off [1/4, 3/4] and exactly 1 on [1/3, 2/3]."""
    x = np.asarray(x, dtype=float)
    mirrored = np.minimum(x, 1.0 - x)
    out = transition(RAMP * (mirrored - SUPPORT[0]))
    return out if out.ndim else float(out)


def w_deriv(x):
    x = np.asarray(x, dtype=float)
    left = x < 0.5
    mirrored = np.where(left, x, 1.0 - x)
    d = RAMP * transition_deriv(RAMP * (mirrored - SUPPORT[0]))
    out = np.where(left, d, -d)
    return out if out.ndim else float(out)


def _phase(t):
    return np.exp(-1j * np.pi * t)


@lru_cache(maxsize=None)
def gl_nodes(a, b, panels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def w_hat_profile(t, chunk=4096):
    """R(t) = e(t/2) What(t), by fixed composite Gauss-Legendre on the ramp.

    Accurate to ~1e-15 for |t| <= T_MAX; vectorised.
    """
    t = np.abs(np.asarray(t, dtype=float))
    flat = t.ravel()
    s, w = gl_nodes(1 / 6, 0.25, _GL_PANELS, _GL_ORDER)
    ramp = transition(RAMP * (0.25 - s)) * w
    out = np.empty(flat.shape)
    for i in range(0, flat.size, chunk):
        tt = flat[i:i + chunk]
        tr = np.cos(2 * np.pi * np.outer(tt, s)) @ ramp
        with np.errstate(invalid="ignore", divide="ignore"):
            plateau = np.where(tt == 0, 1 / 6, np.sin(np.pi * tt / 3) / (2 * np.pi * np.where(tt == 0, 1, tt)))
        out[i:i + chunk] = 2 * (plateau + tr)
    out = out.reshape(t.shape)
    return out if out.ndim else float(out)


def w_hat_array(t):
    """What(t) = integral of W(u) e(-ut) du, vectorised, complex."""
    t = np.asarray(t, dtype=float)
    return _phase(t) * w_hat_profile(t)


def w_hat(t, tol=1e-12):
    """What(t) by adaptive oscillatory quadrature (QUADPACK QAWO) on the ramp.

    The plateau contributes a closed form. Raises QuadratureError when the
    reported error exceeds ``tol``.
    """
    t = float(t)
    at = abs(t)
    f = lambda s: float(transition(RAMP * (0.25 - s)))
    if at == 0:
        tr, err = integrate.quad(f, 1 / 6, 0.25, epsabs=tol / 4, epsrel=0)
        plateau = 1 / 6
    else:
        tr, err = integrate.quad(f, 1 / 6, 0.25, weight="cos", wvar=2 * math.pi * at,
                                 epsabs=tol / 4, epsrel=0, limit=1000)
        plateau = math.sin(math.pi * at / 3) / (2 * math.pi * at)
    if err > tol / 2:
        raise QuadratureError(f"What({t}): error estimate {err:.3g} exceeds {tol:.3g}")
    return complex(np.exp(-1j * math.pi * t) * 2 * (plateau + tr))


class FourierTable:
    """Tabulated What on [0, t_max] for bulk kernels.

    R is interpolated by a cubic spline (error well below 1e-9 at the default
    step); the phase e(-t/2) is applied exactly. Beyond t_max the table returns
    0, which is within ``tail`` of the true value.
    """

    def __init__(self, t_max=T_MAX, step=0.01, tolerance=1e-9):
        self.t_max = float(t_max)
        self.step = float(step)
        self.tolerance = tolerance
        n = int(math.ceil(self.t_max / self.step))
        self.grid = np.linspace(0.0, n * self.step, n + 1)
        self.values = w_hat_profile(self.grid)
        self._spline = CubicSpline(self.grid, self.values, bc_type=((1, 0.0), "natural"))
        self.tail = float(np.max(np.abs(self.values[-50:])))

    def profile(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        out = np.where(t <= self.t_max, self._spline(np.minimum(t, self.t_max)), 0.0)
        return out if out.ndim else float(out)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = _phase(t) * self.profile(t)
        return out if out.ndim else complex(out)

    def decay_constants(self, bs=(1, 2, 3, 4), t_min=0.0):
        """Fitted C_B = max over the grid of |What(t)| / min(1, |t|^-B)."""
        t = self.grid[self.grid >= t_min]
        v = np.abs(self.values[self.grid >= t_min])
        out = {}
        for b in bs:
            env = np.minimum(1.0, np.where(t > 0, t, 1.0) ** (-float(b)))
            out[b] = float(np.max(v / env))
        return out


@lru_cache(maxsize=4)
def default_table(t_max=T_MAX, step=0.01):
    return FourierTable(t_max, step)


@dataclass(frozen=True)
class SmoothWeight:
    """The fixed bump together with the tolerances used to evaluate its transform."""

    support: tuple = SUPPORT
    plateau: tuple = PLATEAU
    quad_tol: float = 1e-12
    t_max: float = T_MAX

    def __call__(self, x):
        return w_eval(x)

    def deriv(self, x):
        return w_deriv(x)

    def hat(self, t):
        return w_hat(t, self.quad_tol)

    def hat_array(self, t):
        return w_hat_array(t)

    def table(self):
        return default_table(self.t_max)

    def max_deriv(self, samples=200001):
        x = np.linspace(0, 1, samples)
        return float(np.max(np.abs(w_deriv(x))))


def truncation_radius(v, t_max=T_MAX):
    """Number of dual terms n with |n/v| <= t_max."""
    return int(math.ceil(v * t_max))


def poisson_check(v, u, truncation=None, form=1):
    """Compare both sides of a Poisson summation identity for f = W.

    form 1:  sum_m W(vm + u)              vs  (1/v) sum_n What(n/v) e(un/v)
    form 2:  sum_n W(n/v) e(un/v)         vs  v sum_m What(vm - u)

    Returns (lhs, rhs, |lhs - rhs|). The W side is a finite sum; the What side
    is truncated at ``truncation`` (default: where the decay bound falls below 1e-13).
    """
    if v <= 0:
        raise ValueError("v must be positive")
    if form == 1:
        lo = math.ceil((SUPPORT[0] - u) / v)
        hi = math.floor((SUPPORT[1] - u) / v)
        m = np.arange(lo, hi + 1)
        lhs = math.fsum(np.atleast_1d(w_eval(v * m + u)).tolist())
        T = truncation if truncation is not None else truncation_radius(v)
        n = np.arange(1, T + 1)
        # conjugate pairs +-n; the imaginary parts cancel
        terms = w_hat_profile(n / v) * np.cos(2 * np.pi * n * (u - 0.5) / v)
        rhs = (W_HAT_0 + 2 * math.fsum(terms.tolist())) / v
        return lhs, rhs, abs(lhs - rhs)
    if form == 2:
        lo = math.ceil(SUPPORT[0] * v)
        hi = math.floor(SUPPORT[1] * v)
        n = np.arange(lo, hi + 1)
        vals = np.atleast_1d(w_eval(n / v)) * np.exp(2j * np.pi * u * n / v)
        lhs = complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))
        T = truncation if truncation is not None else int(math.ceil((T_MAX + abs(u)) / v))
        m = np.arange(-T, T + 1)
        vals = w_hat_array(v * m - u)
        rhs = v * complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))
        return lhs, rhs, abs(lhs - rhs)
    raise ValueError(f"unknown form {form}")
