"""The acceptance battery: thirteen numbered checks, each writing a data file.

Data files hold numbers only (no timings), so two runs with the same
configuration produce identical bytes; check 13 verifies exactly that.
"""
import filecmp
import math
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import lattice
from .apps import dioph_search, palindrome_e2_brute, palindrome_e2_count, verify_solution
from .arith import SQRT2
from .config import RunConfig
from .errors import AdmissibilityError
from .instance import b_instance, random_instance
from .sums import (
    ONE,
    VARPI,
    F_eval,
    F_naive,
    check_tau,
    coefficient_from_name,
    decomposition_error,
    exponent_fit,
    g_hat,
    harmonic_T_direct,
    harmonic_T_naive,
    s1_decompose,
    s10,
    type1,
    type1_smooth,
    type1_variant,
    type2,
    window_centre,
    write_csv,
    zerosum_check,
)
from .weight import poisson_check

MN_CAP = 10**7


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str
    rows: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:02d} {self.title}: {self.detail}"


def _rel(a, b, floor=1e-300):
    scale = max(abs(a), abs(b), floor)
    return abs(a - b) / scale


# --- 1 and 2: oracles and the decomposition ------------------------------------

def toy_shape(p, rng):
    """(M, N) with x/4 <= MN <= min(4x, 10^7) and M, N <= z^(2-delta); N kept small for the triple oracle."""
    lim = p.z ** (2 - p.delta)
    lo, hi = p.x / 4 * 1.001, min(4 * p.x, MN_CAP) * 0.999
    mn = lo * (hi / lo) ** rng.random()
    n_lo = max(4.0, mn / lim)
    n_hi = max(n_lo, min(lim, 120.0))
    N = n_lo * (n_hi / n_lo) ** rng.random()
    return mn / N, N


def _pairs(rng, N, count):
    out = []
    lo, hi = int(N) + 1, int(2 * N)
    while len(out) < count:
        n1, n2 = rng.randint(lo, hi), rng.randint(lo, hi)
        if math.gcd(n1, n2) == 1:
            out.append((n1, n2))
    return out


def oracle_battery(cfg, count=50):
    rng = random.Random(cfg.seed)
    rows, decomp = [], []
    for i in range(count):
        p = random_instance(rng)
        M, N = toy_shape(p, rng)
        alpha = coefficient_from_name("random-sign", seed=rng.randrange(1 << 30))
        ops = [
            type1(alpha, M, N, p, oracle=True),
            type1_smooth(alpha, M, N, p, oracle=True),
            type1_variant(VARPI, M, N, p, oracle=True),
            type2(M, N, p, alpha=alpha, oracle=True, bypass_window=True),
        ]
        for r in ops:
            rows.append((i, r.operation, r.value, r.oracle_value))
        fast, slow = s1_decompose(M, N, p), s1_decompose(M, N, p, oracle=True)
        for name, a, b in zip(("S1", "S11", "S12", "S13"), fast, slow):
            rows.append((i, name, a, b))
        decomp.append((i, *fast, decomposition_error(fast)))
        for n1, n2 in _pairs(rng, N, 3):
            rows.append((i, "harmonic_T", harmonic_T_direct(M, n1, n2, p), harmonic_T_naive(M, n1, n2, p)))
            c = rng.randint(-10 * p.q, 10 * p.q)
            fd, fo = F_eval(n1, n2, c, p), F_naive(n1, n2, c, p)
            rows.append((i, "F_eval", fd, fo))
        lo, hi = lattice.dyadic(M)
        for m in rng.sample(range(lo + 1, hi + 1), min(20, hi - lo)):
            rows.append((i, "psi", lattice.psi(m, p, N), lattice.psi_naive(m, p, N)))
    return rows, decomp


def crit_oracles(cfg):
    rows, decomp = oracle_battery(cfg)
    tol = cfg.tol("oracle")
    out = []
    worst = 0.0
    for i, op, a, b in rows:
        d = _rel(a, b)
        worst = max(worst, d)
        real = lambda v: complex(v).real
        imag = lambda v: complex(v).imag
        out.append({"instance": i, "operation": op, "value_re": real(a), "value_im": imag(a),
                    "oracle_re": real(b), "oracle_im": imag(b), "rel_diff": d})
    c1 = Outcome(1, "Oracle equivalence", worst <= tol,
                 f"max relative difference {worst:.3g} over {len(rows)} comparisons (tol {tol:g})", out)
    tol2 = cfg.tol("identity")
    worst2 = max(d[-1] for d in decomp)
    rows2 = [{"instance": i, "S1": s1, "S11": s11, "S12": s12, "S13": s13, "rel_defect": e}
             for i, s1, s11, s12, s13, e in decomp]
    c2 = Outcome(2, "Decomposition S1 = S11 - 2 S12 + S13", worst2 <= tol2,
                 f"max relative defect {worst2:.3g} over {len(decomp)} instances (tol {tol2:g})", rows2)
    return [c1, c2]


# --- 3: lattices --------------------------------------------------------------

def _coprime_pair(rng, qmax):
    while True:
        q = rng.randint(2, qmax)
        a = rng.randrange(1, q) if q > 2 else 1
        if math.gcd(a, q) == 1:
            return q, a


def crit_lattice(cfg):
    rng = random.Random(cfg.seed + 3)
    bad_det = bad_sv = bad_mink = 0
    rows = []
    for _ in range(20):
        q, a = _coprime_pair(rng, 10**5)
        for m in range(1, 201):
            L = lattice.lambda_basis(m, q, a)
            idx = lattice.brute_force_index(m, q, a)
            r1 = lattice.gauss_reduce(L).r1_sq
            bad_det += (idx != m) or (L.determinant != m)
            bad_mink += r1 > math.ceil(4 * m / math.pi)
    for _ in range(1000):
        q, a = _coprime_pair(rng, 10**5)
        m = rng.randint(1, 10**4)
        r1 = lattice.r1_squared(m, q, a)
        bf = lattice.brute_force_shortest(m, q, a)
        bad_sv += r1 != bf
        bad_mink += r1 > math.ceil(4 * m / math.pi)
        rows.append({"q": q, "a": a, "m": m, "r1_sq": r1, "brute_force": bf})
    ok = bad_det == bad_sv == bad_mink == 0
    return [Outcome(3, "Lattice exactness", ok,
                    f"determinant mismatches {bad_det}/4000, shortest-vector mismatches {bad_sv}/1000, "
                    f"Minkowski violations {bad_mink}", rows)]


# --- 4: Poisson ------------------------------------------------------------------

def crit_poisson(cfg):
    rng = random.Random(cfg.seed + 4)
    tol = cfg.tol("poisson")
    rows, worst = [], 0.0
    for _ in range(100):
        v, u = rng.uniform(0.1, 10), rng.uniform(-2, 2)
        for form in (1, 2):
            lhs, rhs, d = poisson_check(v, u, form=form)
            worst = max(worst, d)
            rows.append({"v": v, "u": u, "form": form, "lhs_re": complex(lhs).real, "rhs_re": complex(rhs).real,
                         "discrepancy": d})
    return [Outcome(4, "Poisson identities", worst <= tol,
                    f"max discrepancy {worst:.3g} over 200 checks (tol {tol:g})", rows)]


# --- 5: support of ghat ----------------------------------------------------------

def _ghat_instances(cfg):
    rng = random.Random(cfg.seed + 5)
    out = [b_instance(50), b_instance(100), b_instance(200)]
    while len(out) < 5:
        out.append(random_instance(rng))
    return out


def crit_ghat(cfg):
    rng = random.Random(cfg.seed + 50)
    tol = cfg.tol("ghat_support")
    rows, worst = [], 0.0
    for idx, p in enumerate(_ghat_instances(cfg)):
        N = 2 * p.z
        for _ in range(100):
            (n1, n2), = _pairs(rng, N, 1)
            t = rng.choice((-1, 1)) * rng.uniform(4, 12) * p.z / p.q
            c = rng.randint(-5 * p.q, 5 * p.q)
            g = abs(g_hat(t, n1, n2, c, p))
            worst = max(worst, g)
            rows.append({"instance": idx, "q": p.q, "t": t, "n1": n1, "n2": n2, "c": c, "abs_ghat": g})
    return [Outcome(5, "ghat vanishes for |t| >= 4z/q", worst <= tol,
                    f"max |ghat| {worst:.3g} over 500 samples on 5 instances (tol {tol:g})", rows)]


# --- 6: zero sum ------------------------------------------------------------------

def _zerosum_stat(p, N, rng, samples):
    best, rows = 0.0, []
    for _ in range(samples):
        lo, hi = int(N) + 1, int(2 * N)
        n1, n2 = rng.randint(lo, hi), rng.randint(lo, hi)
        t = rng.uniform(-50, 50)
        k = rng.randint(-1000, 1000)
        v = zerosum_check(t, k, n1, n2, p)
        best = max(best, v)
        rows.append({"N": N, "t": t, "k": k, "n1": n1, "n2": n2, "abs_sum": v})
    return best, rows


def crit_zerosum(cfg):
    rng = random.Random(cfg.seed + 6)
    p = b_instance(100)
    hold, rows1 = _zerosum_stat(p, p.z, rng, 100)
    broken, rows2 = _zerosum_stat(p, p.z / 2, rng, 100)
    ok = hold <= cfg.tol("zerosum") and broken > cfg.tol("zerosum_violated")
    return [Outcome(6, "Zero sum needs N >= z", ok,
                    f"max with N = z: {hold:.3g}; max with N = z/2: {broken:.3g}", rows1 + rows2)]


# --- 7, 8: scaling trends ---------------------------------------------------------

def _nonincreasing(vals):
    return all(b <= a for a, b in zip(vals, vals[1:]))


def crit_type1(cfg):
    rows = []
    for b in (50, 100, 200, 400):
        p = b_instance(b, cfg.delta)
        r = type1(ONE, b, b * b / 4, p)
        rows.append({"b": b, "M": b, "N": b * b / 4, "value": r.value, "main_term": r.main_term,
                     "rel_error": r.rel_error})
    errs = [r["rel_error"] for r in rows]
    ok = _nonincreasing(errs) and errs[-1] <= cfg.tol("typei_final")
    return [Outcome(7, "Type I relative error trend", ok,
                    "rel_error by b: " + ", ".join(f"{r['b']}:{r['rel_error']:.3g}" for r in rows), rows)]


def crit_type2(cfg):
    rows = []
    for b in (100, 200, 400, 800):
        p = b_instance(b, cfg.delta)
        N = window_centre(p)
        M = p.x / (4 * N)
        r = type2(M, N, p)
        rows.append({"b": b, "M": M, "N": N, "value": r.value, "value_over_z2": r.value_over_z2})
    v = [r["value_over_z2"] for r in rows]
    ok = all(b < a for a, b in zip(v, v[1:]))
    return [Outcome(8, "Type II |S|/z^2 trend", ok,
                    "|S|/z^2 by b: " + ", ".join(f"{r['b']}:{r['value_over_z2']:.3g}" for r in rows), rows)]


# --- 9, 10: applications -----------------------------------------------------------

def crit_palindrome(cfg):
    count10, ratio10 = palindrome_e2_count(10)
    brute = palindrome_e2_brute(10)
    rows = [{"b": 10, "count": count10, "density_ratio": ratio10, "oracle_count": brute}]
    ratios = []
    for b in (100, 300, 1000):
        c, r = palindrome_e2_count(b)
        ratios.append(r)
        rows.append({"b": b, "count": c, "density_ratio": r, "oracle_count": None})
    spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
    ok = count10 == brute and min(ratios) > 0 and spread < cfg.tol("density_factor")
    return [Outcome(9, "Palindrome semiprime counts", ok,
                    f"b=10 count {count10} vs oracle {brute}; density ratio spread {spread:.3g}", rows)]


def crit_dioph(cfg):
    res = dioph_search(SQRT2, Fraction(1, 3), 10**3, 10**5, near_factor=None, workers=cfg.workers)
    verified = sum(verify_solution(SQRT2, s, Fraction(1, 3)) for s in res.solutions)
    try:
        check_tau(0.35)
        rejected = False
    except AdmissibilityError:
        rejected = True
    rows = [s.row() for s in res.solutions]
    ok = len(res.solutions) >= 1 and verified == len(res.solutions) and rejected
    return [Outcome(10, "Diophantine semiprimes near sqrt2 multiples", ok,
                    f"{len(res.solutions)} certified solutions from q in "
                    f"{[p.q for p in res.instances]}, {verified} re-verified at 256 bits; "
                    f"tau=0.35 rejected: {rejected}", rows)]


# --- 11, 12 -------------------------------------------------------------------------

def crit_moments(cfg):
    rows = []
    for b in (100, 200, 400):
        p = b_instance(b, cfg.delta)
        M, N = b, b * b / 4
        s, s1 = lattice.moment_sums(M, p, N, workers=cfg.workers)
        rows.append({"b": b, "M": M, "N": N, "sum_psi_sq": s, "sum_psi1_sq": s1,
                     "psi1_over_z2": s1 / p.z**2, "psi_scaled": s * p.q / (N * p.z**3)})
    f = cfg.tol("moment_factor")
    sp1 = [r["psi1_over_z2"] for r in rows]
    sp = [r["psi_scaled"] for r in rows]
    ok = max(sp1) / min(sp1) <= f and max(sp) / min(sp) <= f
    return [Outcome(11, "Moment trends", ok,
                    f"sum Psi1^2/z^2 spread {max(sp1) / min(sp1):.3g}, sum Psi^2 q/(N z^3) spread "
                    f"{max(sp) / min(sp):.3g} (limit {f:g})", rows)]


def crit_s10(cfg):
    rng = random.Random(cfg.seed + 12)
    cl = rng.randint(1, 10**6)
    results = [s10(N, cl) for N in (1000, 3000, 10000)]
    slope = exponent_fit(results)
    exps = [r.exponent for r in results]
    lim = cfg.tol("s10_exponent")
    ok = max(exps) < lim and slope < lim
    rows = [{"N": r.N, "cl": cl, "aggregate": r.aggregate, "exponent": r.exponent, "full_sum": r.full_sum}
            for r in results] + [{"N": "fit", "cl": cl, "aggregate": None, "exponent": slope, "full_sum": None}]
    return [Outcome(12, "S10 cancellation", ok,
                    "exponents " + ", ".join(f"{e:.4f}" for e in exps) + f"; fitted slope {slope:.4f} (limit {lim:g})",
                    rows)]


CHECKS = (crit_oracles, crit_lattice, crit_poisson, crit_ghat, crit_zerosum, crit_type1, crit_type2,
          crit_palindrome, crit_dioph, crit_moments, crit_s10)


def _write(outcomes, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    names = []
    for o in outcomes:
        name = f"criterion_{o.number:02d}.csv"
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
            if o.rows:
                write_csv(o.rows, fh=fh)
        names.append(name)
    with open(os.path.join(out_dir, "summary.csv"), "w", encoding="utf-8", newline="") as fh:
        write_csv([{"criterion": o.number, "title": o.title, "passed": o.passed, "detail": o.detail}
                   for o in outcomes], fh=fh)
    return names + ["summary.csv"]


def run_checks(cfg, out_dir, checks=CHECKS, echo=print):
    outcomes = []
    for check in checks:
        t0 = time.perf_counter()
        res = check(cfg)
        dt = time.perf_counter() - t0
        for o in res:
            o.seconds = dt / len(res)
            outcomes.append(o)
            if echo:
                echo(f"{o.line()}  ({o.seconds:.1f} s)")
    return outcomes, _write(outcomes, out_dir)


def determinism(cfg, first_dir, names, checks=CHECKS, echo=print):
    second = os.path.join(os.path.dirname(first_dir.rstrip("/")) or ".", "repeat")
    run_checks(cfg, second, checks, echo=None)
    diffs = [n for n in names if not filecmp.cmp(os.path.join(first_dir, n), os.path.join(second, n), shallow=False)]
    o = Outcome(13, "Determinism of output files", not diffs,
                f"{len(names)} files compared, differing: {diffs or 'none'}")
    if echo:
        echo(o.line())
    return o


def run_suite(cfg=None, echo=print, repeat=True):
    """Run every check into <output>/run (and <output>/repeat for check 13). Returns the outcomes."""
    cfg = cfg or RunConfig()
    first = os.path.join(cfg.output, "run")
    outcomes, names = run_checks(cfg, first, echo=echo)
    if repeat:
        outcomes.append(determinism(cfg, first, names, echo=echo))
    return outcomes
