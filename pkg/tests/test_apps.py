from fractions import Fraction

import mpmath
import pytest

from e2lab.apps import (
    a_inside_palindromes,
    digits,
    dioph_instance,
    dioph_search,
    dioph_solve,
    palindrome_array,
    palindrome_e2_brute,
    palindrome_e2_count,
    palindrome_members,
    palindromes_brute,
    verify_solution,
)
from e2lab.arith import SQRT2, convergents_in_range, is_e2
from e2lab.errors import AdmissibilityError, CeilingExceeded, UsageError


def test_palindrome_examples():
    assert list(palindrome_members(10)) == [n for n in range(100, 1000) if str(n) == str(n)[::-1]]
    assert list(palindrome_members(2)) == [5, 7]
    for n in palindrome_members(7):
        d = digits(n, 7)
        assert d == d[::-1] and len(d) == 3


@pytest.mark.parametrize("b", [2, 3, 10, 17, 64])
def test_palindrome_set_equality(b):
    vals = palindrome_array(b)
    assert vals.size == b * (b - 1)
    assert vals.tolist() == palindromes_brute(b)


def test_palindrome_count_b10():
    count, ratio = palindrome_e2_count(10)
    assert count == palindrome_e2_brute(10)
    assert is_e2(141) and is_e2(323) and 141 in palindrome_array(10) and 323 in palindrome_array(10)


@pytest.mark.parametrize("b", [10, 50, 100])
def test_instance_inside_palindromes(b):
    assert a_inside_palindromes(b)


def test_palindrome_errors():
    with pytest.raises(UsageError):
        palindrome_array(1)
    with pytest.raises(CeilingExceeded):
        palindrome_e2_count(2000)


def test_dioph_instance_windows():
    tau = Fraction(1, 3)
    for conv in convergents_in_range(SQRT2, 10**3, 10**5):
        p = dioph_instance(conv, tau)
        assert p.z == pytest.approx(p.q ** ((1 - 1 / 3) / (1 + 1 / 3)), rel=1e-12)
        assert p.a * conv.numerator % p.q == 1


def test_dioph_solve_small():
    sols = dioph_solve(SQRT2, Fraction(1, 3), 1000, 6000)
    assert sols
    assert [s.n for s in sols] == sorted(s.n for s in sols)
    for s in sols[:200]:
        assert is_e2(s.n)
        assert s.factor_pair[0] * s.factor_pair[1] == s.n
        assert verify_solution(SQRT2, s, Fraction(1, 3))
        with mpmath.workprec(256):
            assert s.distance <= s.bound


def test_dioph_empty_and_gate():
    assert dioph_solve(SQRT2, Fraction(1, 3), 3000, 5000) == []
    with pytest.raises(AdmissibilityError):
        dioph_search(SQRT2, 0.35, 1000, 6000)


def test_near_misses_are_not_solutions():
    res = dioph_search(SQRT2, Fraction(1, 3), 1000, 3000, near_factor=2)
    sols = {s.n for s in res.solutions}
    assert not sols & set(res.near_misses)


def test_worker_invariance():
    a = dioph_solve(SQRT2, Fraction(1, 3), 1000, 6000, workers=1)
    b = dioph_solve(SQRT2, Fraction(1, 3), 1000, 6000, workers=2)
    assert [s.row() for s in a] == [s.row() for s in b]
