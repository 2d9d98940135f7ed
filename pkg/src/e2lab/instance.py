"""Instance parameters and the structured set A(x, q, z, a) with its smoothed indicator Phi.

A = { n in (x/4, x] : n = a k (mod q) for some integer k in [0, z) }
Phi(n) = sum over k = n a_inv (mod q) of W(k/z)

Since z < q/4 only the least residue k0 = n a_inv mod q can land in the
support [z/4, 3z/4] of W(./z), so Phi(n) = W(k0/z).
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import mod_inverse, omega2_mask
from .errors import CeilingExceeded, NonCoprimeError, UsageError, WindowViolation
from .weight import w_eval

ENUMERATION_CEILING = 2 * 10**9
_REL_SLACK = 1e-12


def as_fraction(tau):
    """Exact rational for tau. Floats snap to the nearest fraction with denominator <= 10**12."""
    if isinstance(tau, Fraction):
        return tau
    if isinstance(tau, int):
        return Fraction(tau)
    if isinstance(tau, str):
        return Fraction(tau.strip())
    return Fraction(float(tau)).limit_denominator(10**12)


def z_centre(tau, q):
    tau = float(tau)
    return q ** ((1 - tau) / (1 + tau))


def x_centre(tau, q):
    return q ** (2 / (1 + float(tau)))


@dataclass(frozen=True)
class InstanceParams:
    tau: Fraction
    q: int
    a: int
    a_inv: int
    z: float
    x: float
    delta: float

    # key=value record -------------------------------------------------
    _KEYS = ("tau", "q", "a", "z", "x", "delta")

    def to_record(self):
        vals = {"tau": str(self.tau), "q": str(self.q), "a": str(self.a),
                "z": repr(float(self.z)), "x": repr(float(self.x)), "delta": repr(float(self.delta))}
        return "".join(f"{k}={vals[k]}\n" for k in self._KEYS)

    @classmethod
    def from_record(cls, text, validate=True):
        vals = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"malformed record line: {line!r}")
            key = key.strip()
            if key not in cls._KEYS and key != "a_inv":
                raise UsageError(f"unknown instance key {key!r}")
            vals[key] = value.strip()
        missing = set(cls._KEYS) - set(vals)
        if missing:
            raise UsageError(f"instance record lacks {sorted(missing)}")
        return derive_params(Fraction(vals["tau"]), int(vals["q"]), int(vals["a"]),
                             z=float(vals["z"]), x=float(vals["x"]),
                             delta=float(vals["delta"]), validate=validate)

    @classmethod
    def load(cls, path, validate=True):
        with open(path, encoding="utf-8") as fh:
            return cls.from_record(fh.read(), validate=validate)

    def as_dict(self):
        return {"tau": str(self.tau), "q": self.q, "a": self.a, "a_inv": self.a_inv,
                "z": self.z, "x": self.x, "delta": self.delta}


def _within(value, lo, hi):
    return lo * (1 - _REL_SLACK) <= value <= hi * (1 + _REL_SLACK)


def derive_params(tau, q, a, z=None, x=None, delta=0.01, validate=True):
    """Validated InstanceParams; z and x default to the centres of their windows."""
    tau = as_fraction(tau)
    q, a = int(q), int(a)
    if not 0 < tau < 1:
        raise WindowViolation(f"tau={tau} must lie in (0, 1)")
    if q < 2:
        raise UsageError(f"q={q} must be >= 2")
    if math.gcd(a, q) != 1:
        raise NonCoprimeError(f"gcd(a, q) = gcd({a}, {q}) = {math.gcd(a, q)} != 1")
    if delta <= 0:
        raise WindowViolation(f"delta={delta} must be positive")
    zc, xc = z_centre(tau, q), x_centre(tau, q)
    z = zc if z is None else float(z)
    x = xc if x is None else float(x)
    if validate:
        if not _within(z, zc / 2, 2 * zc):
            side = "z > 2 q^((1-tau)/(1+tau))" if z > zc else "z < q^((1-tau)/(1+tau)) / 2"
            raise WindowViolation(f"{side}: z={z}, window [{zc / 2:.6g}, {2 * zc:.6g}]")
        if not _within(x, xc / 2, 2 * xc):
            side = "x > 2 q^(2/(1+tau))" if x > xc else "x < q^(2/(1+tau)) / 2"
            raise WindowViolation(f"{side}: x={x}, window [{xc / 2:.6g}, {2 * xc:.6g}]")
        if not z < q / 4:
            raise WindowViolation(f"z >= q/4 (z={z}, q={q}): single-residue evaluation of Phi needs z < q/4")
        if not _within(z * q / x, 0.25, 4.0):
            raise WindowViolation(f"z q / x = {z * q / x:.6g} outside [1/4, 4]")
    return InstanceParams(tau, q, a % q, mod_inverse(a % q, q), z, x, float(delta))


def b_instance(b, delta=0.01):
    """The palindrome instance: tau = 1/3, q = b^2 + 1, z = b, x = b^3, a = b."""
    return derive_params(Fraction(1, 3), b * b + 1, b, z=b, x=b**3, delta=delta)


def residues(n, p):
    """k0(n) = n a_inv mod q, vectorised (int64 when safe, Python ints otherwise)."""
    if p.q < (1 << 31):
        n = np.asarray(n, dtype=np.int64)
        return (n % p.q) * p.a_inv % p.q
    n = np.asarray(n, dtype=object)
    return np.asarray(n * p.a_inv % p.q, dtype=np.int64)


def phi(n, p):
    """Phi(n) = W(k0(n)/z); vectorised over n."""
    k0 = residues(n, p)
    out = w_eval(np.asarray(k0, dtype=float) / p.z)
    return out


def membership(n, p):
    n_arr = np.asarray(n)
    k0 = residues(n_arr, p)
    out = (n_arr > p.x / 4) & (n_arr <= p.x) & (k0 < p.z)
    return out if out.ndim else bool(out)


def _range_bounds(p):
    lo = math.floor(p.x / 4)  # n > x/4
    hi = math.floor(p.x)      # n <= x
    return lo, hi


def enumerate_A(p, ceiling=ENUMERATION_CEILING, rows_per_chunk=None):
    """Yield the members of A as ascending int64 arrays.

    Built from the residue progressions n = a k (mod q), k in [0, z): each
    block [jq, (j+1)q) contributes jq + (sorted residues).
    """
    if p.x > ceiling:
        raise CeilingExceeded(f"x={p.x:.6g} exceeds enumeration ceiling {ceiling:.6g}")
    lo, hi = _range_bounds(p)
    if lo >= hi:
        return
    kmax = math.ceil(p.z)  # k in [0, z) means k <= kmax - 1
    ks = np.arange(kmax, dtype=np.int64)
    ks = ks[ks < p.z]
    res = np.unique(ks * p.a % p.q)
    if rows_per_chunk is None:
        rows_per_chunk = max(1, (1 << 20) // max(len(res), 1))
    j0, j1 = lo // p.q, hi // p.q
    for j in range(j0, j1 + 1, rows_per_chunk):
        js = np.arange(j, min(j + rows_per_chunk, j1 + 1), dtype=np.int64)
        block = (js[:, None] * p.q + res[None, :]).ravel()
        block = block[(block > lo) & (block <= hi)]
        if block.size:
            yield block


def members(p, ceiling=ENUMERATION_CEILING):
    chunks = list(enumerate_A(p, ceiling))
    return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)


def count_e2_in_A(p, squarefree=False, ceiling=ENUMERATION_CEILING):
    """(#(A ∩ E2), count * log z / z^2)."""
    count = 0
    for block in enumerate_A(p, ceiling):
        count += int(np.count_nonzero(omega2_mask(block, squarefree=squarefree)))
    return count, count * math.log(p.z) / p.z**2


def random_instance(rng, q_range=(1000, 10**4), tau_range=(0.2, 0.34), delta=0.01):
    """A valid toy instance drawn from ``rng`` (a random.Random)."""
    while True:
        tau = Fraction(rng.randint(int(tau_range[0] * 1000), int(tau_range[1] * 1000)), 1000)
        q = rng.randint(*q_range)
        a = rng.randrange(1, q)
        if math.gcd(a, q) != 1:
            continue
        z = z_centre(tau, q) * 2 ** rng.uniform(-0.5, 0.5)
        x = x_centre(tau, q) * 2 ** rng.uniform(-0.5, 0.5)
        try:
            return derive_params(tau, q, a, z=z, x=x, delta=delta)
        except WindowViolation:
            continue
