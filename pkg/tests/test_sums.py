import math
import random
from fractions import Fraction

import numpy as np
import pytest

from e2lab import lattice
from e2lab.errors import AdmissibilityError, HypothesisViolation, NonCoprimeError, UsageError
from e2lab.instance import b_instance, derive_params, phi
from e2lab.sums import (
    ONE,
    VARPI,
    ZERO,
    F_eval,
    F_naive,
    admissible_window,
    cauchy_check,
    check_tau,
    coefficient_from_name,
    decomposition_error,
    diagonal_terms,
    exponent_fit,
    g_hat,
    g_hat_bound,
    g_hat_direct,
    h_derivative_bound,
    h_n1_derivative,
    h_n1_derivative_fd,
    h_weight,
    harmonic_T,
    harmonic_T_naive,
    inner_sums,
    s1_decompose,
    s10,
    s2_sum,
    truncation_ranges,
    truncation_tail,
    type1,
    type1_smooth,
    type1_variant,
    type2,
    variant_rows,
    window_centre,
    write_csv,
    to_json,
    zerosum_check,
)
from e2lab.weight import W_HAT_0


@pytest.fixture(scope="module")
def p100():
    return b_instance(100)


@pytest.fixture(scope="module")
def toy():
    return derive_params(Fraction(1, 4), 9973, 1234)


def test_zero_coefficients(p100):
    r = type1(ZERO, 100, 2500, p100)
    assert r.value == 0 and r.main_term == 0
    assert type1_smooth(ZERO, 100, 2500, p100).value == 0
    assert type1_variant(ZERO, 100, 2500, p100).value == 0


def test_type1_matches_oracle(p100):
    r = type1(ONE, 100, 2500, p100, oracle=True)
    assert r.value == r.oracle_value
    assert r.main_term == pytest.approx(W_HAT_0 * 2500 * p100.z / p100.q * 100)


def test_type1_random_signs(toy):
    a = coefficient_from_name("random-sign", seed=4)
    for fn in (type1, type1_smooth):
        r = fn(a, 300, 2500, toy, oracle=True)
        assert r.oracle_rel_diff < 1e-12


def test_type1_variant_regrouping(toy):
    r = type1_variant(VARPI, 3000, 300, toy, oracle=True)
    assert r.oracle_rel_diff < 1e-12
    ms, wm, B, P = variant_rows(VARPI, 3000, 300, toy)
    nr = lattice.dyadic(300)
    for i in range(0, ms.size, 211):
        assert P[i] == pytest.approx(lattice.psi_naive(int(ms[i]), toy, 300), rel=1e-12, abs=1e-12)
        ns = np.arange(nr[0] + 1, nr[1] + 1)
        assert B[i] == pytest.approx(math.fsum((VARPI.values(ns) * phi(ms[i] * ns, toy)).tolist()),
                                     rel=1e-12, abs=1e-12)


def test_type2_matches_oracle(p100):
    N = window_centre(p100)
    r = type2(p100.x / (4 * N), N, p100, oracle=True)
    assert r.oracle_rel_diff < 1e-12 and r.main_term == 0


def test_type2_window(p100):
    with pytest.raises(HypothesisViolation) as e:
        type2(5000, 100 / 1.5, p100)
    assert any("N >=" in f for f in e.value.failed)
    type2(2500 * 1.5, 100 / 1.5, p100, bypass_window=True)


def test_hypothesis_messages(p100):
    with pytest.raises(HypothesisViolation) as e:
        type1(ONE, 10, 10, p100)
    assert "x/4 <= MN" in str(e.value)
    with pytest.raises(HypothesisViolation):
        type1_variant(VARPI, 1, p100.x / 2, p100)


def test_coefficient_bounds(p100):
    from e2lab.sums import CoefficientSpec

    bad = CoefficientSpec("custom-bounded", bound=0.5, func=lambda n: np.ones(len(n)))
    with pytest.raises(HypothesisViolation):
        type1(bad, 100, 2500, p100)
    with pytest.raises(UsageError):
        coefficient_from_name("nope")


def test_worker_invariance(toy):
    a = type1(ONE, 300, 2500, toy, workers=1).value
    b = type1(ONE, 300, 2500, toy, workers=4).value
    assert a == b


def test_decomposition(p100):
    fast = s1_decompose(100, 2500 / 1.0, p100)
    slow = s1_decompose(100, 2500, p100, oracle=True)
    assert decomposition_error(fast) < 1e-12
    assert np.allclose(fast, slow, rtol=1e-12)


def test_cauchy_and_diagonal(p100):
    N = window_centre(p100)
    M = p100.x / (4 * N)
    s2, rhs, ms1 = cauchy_check(M, N, p100)
    assert s2 <= rhs * (1 + 1e-12)
    diag, major = diagonal_terms(100, 2500, p100)
    assert diag <= major
    s2_sum(100, 2500, p100)


def test_harmonic_T(toy):
    rng = random.Random(1)
    for _ in range(3):
        n1, n2 = rng.randint(301, 600), rng.randint(301, 600)
        if math.gcd(n1, n2) != 1:
            continue
        d, pois = harmonic_T(300, n1, n2, toy)
        assert d == harmonic_T_naive(300, n1, n2, toy)
        assert abs(d - pois) < 1e-6
    with pytest.raises(NonCoprimeError):
        harmonic_T(300, 4, 6, toy)


def test_harmonic_T_empty(toy):
    # no m in the window has Phi(m n1) > 0
    n1 = next(n for n in range(20000, 40000) if all(phi(m * n, toy) == 0 for m in range(3, 12)))
    d, pois = harmonic_T(5, n1, n1 + 1, toy)
    assert d == 0 and abs(pois) < 1e-6


def test_F_modes(toy):
    rng = random.Random(2)
    for _ in range(5):
        n1, n2 = 311, 457
        c = rng.randint(-5 * toy.q, 5 * toy.q)
        d = F_eval(n1, n2, c, toy)
        assert d == F_naive(n1, n2, c, toy)
        assert abs(d - F_eval(n1, n2, c, toy, mode="poisson")) < 1e-6


def test_g_hat_support_and_quadrature(toy):
    n1, n2, c = 311, 457, 12345
    t0 = 4 * toy.z / toy.q
    for t in (t0, -t0, 1.5 * t0, -7 * t0):
        assert g_hat(t, n1, n2, c, toy) == 0
    rng = random.Random(3)
    for _ in range(5):
        t = rng.uniform(-t0, t0)
        a, b = g_hat(t, n1, n2, c, toy), g_hat_direct(t, n1, n2, c, toy)
        assert abs(a - b) <= 1e-8 * max(1.0, abs(a))


def test_g_hat_bounds(toy):
    C = g_hat_bound(toy, 300, samples=20)
    assert 0 < C < 10
    Ch, Cd = h_derivative_bound(toy, 300, 3000, samples=10)
    assert Ch < 10 and Cd < 1e3


def test_h_derivative(p100):
    N = window_centre(p100)
    rng = random.Random(4)
    for _ in range(10):
        n1, n2 = rng.randint(int(N) + 1, int(2 * N)), rng.randint(int(N) + 1, int(2 * N))
        l, c = rng.randint(1, 5), rng.randint(1, 3000)
        a, b = h_n1_derivative(n1, n2, l, c, p100), h_n1_derivative_fd(n1, n2, l, c, p100)
        assert abs(a - b) <= 1e-6 * max(abs(a), 1e-12) or abs(a - b) < 1e-12
    l_far = math.ceil(8 * N * p100.z / p100.q) * 2
    assert h_weight(int(N) + 1, int(N) + 2, l_far, 5, p100) == 0


def test_zerosum(p100):
    rng = random.Random(5)
    for _ in range(20):
        n1, n2 = rng.randint(101, 200), rng.randint(101, 200)
        assert zerosum_check(rng.uniform(-9, 9), rng.randint(-50, 50), n1, n2, p100) <= 1e-8
    assert zerosum_check(0, 0, 150, 150, p100) <= 1e-8
    worst = max(zerosum_check(rng.uniform(-9, 9), rng.randint(-50, 50), n, n, p100) for n in range(26, 50, 3))
    assert worst > 1e-2


def test_window(p100):
    assert check_tau(Fraction(1, 3)) == Fraction(1, 3)
    for bad in (0.35, Fraction(8, 23)):
        with pytest.raises(AdmissibilityError):
            check_tau(bad)
    lo, hi = admissible_window(p100.tau, p100)
    assert lo == pytest.approx(104.7, abs=0.05) and hi == pytest.approx(129.8, abs=0.05)


def test_truncation_ranges(p100):
    N, M = window_centre(p100), 2000
    l, k, j = truncation_ranges(0.05, N, M, p100)
    z, q = p100.z, p100.q
    assert (l, k, j) == (8 * N * z / q, q * z**0.05 / M, N * z ** (0.1 - 1))
    assert truncation_ranges(0, N, M, p100)[1] == q / M
    assert truncation_tail(0.9, N, M, p100) < 1e-6


def test_s10_unit_case():
    r = inner_sums(1, [5], [2, 3], weights=[1.0, 1.0])
    assert r[0] == pytest.approx(2 * math.cos(4 * math.pi / 5), abs=1e-12)
    assert abs(r[0].imag) < 1e-12
    assert inner_sums(1, [6], [2, 3], weights=[1.0, 1.0])[0] == 0


def test_s10_aggregate_max():
    r = s10(200, 17)
    assert r.full_sum <= r.aggregate * (1 + 1e-12)
    assert r.exponent < 2
    with pytest.raises(UsageError):
        s10(200, 0)


def test_exponent_fit():
    rs = [s10(N, 31) for N in (200, 400, 800)]
    assert 1.0 < exponent_fit(rs) < 1.95


def test_report_output(p100):
    r = type1(ONE, 100, 2500, p100)
    text = write_csv([r.row()])
    header, line = text.splitlines()
    assert "wall_time" not in header
    assert line.split(",")[header.split(",").index("value")] == f"{r.value:.17g}"
    assert '"schema": 1' in to_json([r.row()])
