"""Result records for the sums, coefficient sequences, and CSV/JSON output."""
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..arith import prime_mask_range
from ..errors import HypothesisViolation, UsageError
from ..weight import w_eval

SCHEMA = 1
REL_FLOOR = 1e-15  # times z^2

COEFF_KINDS = ("constant-one", "varpi", "varpi-minus-one", "custom-bounded")


def _varpi(n):
    n = np.asarray(n, dtype=np.int64)
    out = np.zeros(n.shape)
    if n.size == 0:
        return out
    lo = int(n.min())
    mask = prime_mask_range(lo, int(n.max()) + 1)[n - lo]
    out[mask] = np.log(n[mask].astype(float))
    return out


def _mix64(x):
    # splitmix64 finaliser, vectorised
    x = x.astype(np.uint64)
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        x = x ^ (x >> np.uint64(31))
    return x


def random_signs(n, seed=0):
    """Deterministic +-1 per integer n; independent of how n is chunked."""
    n = np.asarray(n, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        h = _mix64(n + np.uint64(seed) * np.uint64(0x9E3779B97F4A7C15))
    return np.where(h & np.uint64(1), 1.0, -1.0)


def zeros(n):
    return np.zeros(np.shape(n))


@dataclass(frozen=True)
class CoefficientSpec:
    """A coefficient sequence c(n) with an explicit bound |c(n)| <= bound.

    ``bound=None`` means the natural bound on the range: 1 for constant-one and
    log of the top of the range for the von Mangoldt-type weights.
    ``func`` (custom-bounded only) must be a picklable vectorised callable.
    """

    kind: str = "constant-one"
    bound: float = None
    func: object = None

    def __post_init__(self):
        if self.kind not in COEFF_KINDS:
            raise UsageError(f"unknown coefficient kind {self.kind!r}; expected one of {COEFF_KINDS}")
        if self.kind == "custom-bounded" and (self.func is None or self.bound is None):
            raise UsageError("custom-bounded coefficients need func and bound")

    def values(self, n):
        n = np.asarray(n, dtype=np.int64)
        if self.kind == "constant-one":
            return np.ones(n.shape)
        if self.kind == "varpi":
            return _varpi(n)
        if self.kind == "varpi-minus-one":
            return _varpi(n) - 1.0
        return np.asarray(self.func(n), dtype=float)

    def bound_for(self, hi):
        if self.bound is not None:
            return float(self.bound)
        if self.kind == "constant-one":
            return 1.0
        return max(1.0, math.log(max(hi, 2)))

    def check(self, lo, hi, values=None):
        """Raise HypothesisViolation if some |c(n)|, lo < n <= hi, exceeds the bound."""
        if values is None:
            values = self.values(np.arange(lo + 1, hi + 1, dtype=np.int64))
        b = self.bound_for(hi)
        worst = float(np.max(np.abs(values))) if len(values) else 0.0
        if worst > b * (1 + 1e-12):
            raise HypothesisViolation(f"|{self.kind} coefficient| reaches {worst:.6g} > bound {b:.6g}",
                                      [f"|coefficient| <= {b:.6g}"])
        return values

    @property
    def label(self):
        return self.kind


ONE = CoefficientSpec("constant-one")
VARPI = CoefficientSpec("varpi")
VARPI_MINUS_ONE = CoefficientSpec("varpi-minus-one")
ZERO = CoefficientSpec("custom-bounded", bound=0.0, func=zeros)


class _Seeded:
    def __init__(self, seed):
        self.seed = seed

    def __call__(self, n):
        return random_signs(n, self.seed)


def coefficient_from_name(name, seed=0):
    if name in ("one", "constant-one"):
        return ONE
    if name == "varpi":
        return VARPI
    if name == "varpi-minus-one":
        return VARPI_MINUS_ONE
    if name == "zero":
        return ZERO
    if name == "random-sign":
        return CoefficientSpec("custom-bounded", bound=1.0, func=_Seeded(seed))
    raise UsageError(f"unknown coefficient {name!r}")


class BumpWeight:
    """n -> W(n / (3 N)), nonzero for 3N/4 < n < 9N/4."""

    def __init__(self, N):
        self.N = N

    def values(self, n):
        return np.atleast_1d(w_eval(np.asarray(n, dtype=float) / (3 * self.N)))

    def range(self):
        return math.floor(0.75 * self.N), math.floor(2.25 * self.N)


@dataclass
class SumReport:
    operation: str
    value: float
    main_term: float
    params: dict
    wall_time: float = 0.0
    coeff: str = ""
    oracle_value: float = None
    extra: dict = field(default_factory=dict)

    @property
    def z(self):
        return self.params["z"]

    @property
    def abs_error(self):
        return abs(self.value - self.main_term)

    @property
    def rel_error(self):
        return self.abs_error / max(abs(self.main_term), self.z**2 * REL_FLOOR)

    @property
    def value_over_z2(self):
        return abs(self.value) / self.z**2

    @property
    def oracle_rel_diff(self):
        if self.oracle_value is None:
            return None
        scale = max(abs(self.oracle_value), abs(self.value), self.z**2 * REL_FLOOR)
        return abs(self.value - self.oracle_value) / scale

    def row(self):
        """Flat record; wall_time is left out so that output files are reproducible."""
        r = {"schema": SCHEMA, "operation": self.operation}
        for k in ("tau", "q", "a", "z", "x", "delta", "M", "N"):
            r[k] = self.params.get(k)
        r.update(coeff=self.coeff, value=self.value, main_term=self.main_term,
                 abs_error=self.abs_error, rel_error=self.rel_error,
                 value_over_z2=self.value_over_z2, oracle_value=self.oracle_value)
        return r


CSV_FIELDS = ("schema", "operation", "tau", "q", "a", "z", "x", "delta", "M", "N", "coeff",
              "value", "main_term", "abs_error", "rel_error", "value_over_z2", "oracle_value")


def fmt(v):
    """17 significant digits for floats; plain text otherwise."""
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(rows, fields=None, fh=None):
    """Write dict rows as CSV; returns the text when ``fh`` is None."""
    rows = list(rows)
    if fields is None:
        fields = list(rows[0].keys()) if rows else []
    out = fh or io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([fmt(r.get(k)) for k in fields])
    return None if fh else out.getvalue()


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def to_json(rows):
    doc = {"schema": SCHEMA, "rows": [{k: _jsonable(v) for k, v in r.items()} for r in rows]}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"
