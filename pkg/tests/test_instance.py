import math
import random
from fractions import Fraction

import numpy as np
import pytest

from e2lab.arith import SQRT2, convergents_in_range, is_e2
from e2lab.errors import CeilingExceeded, NonCoprimeError, WindowViolation
from e2lab.instance import (
    InstanceParams,
    b_instance,
    count_e2_in_A,
    derive_params,
    enumerate_A,
    members,
    membership,
    phi,
    random_instance,
)
from e2lab.weight import w_eval


def brute_members(p):
    lo, hi = math.floor(p.x / 4), math.floor(p.x)
    ks = set((p.a * k) % p.q for k in range(math.ceil(p.z)))
    return [n for n in range(lo + 1, hi + 1) if n % p.q in ks]


def test_derive_params_examples():
    p = derive_params(Fraction(1, 3), 10001, 100, z=100, x=10**6)
    assert p.a_inv == 9901
    with pytest.raises(WindowViolation):
        derive_params(Fraction(1, 3), 10001, 100, z=300)
    conv = [c for c in convergents_in_range(SQRT2, 5741, 5741)][0]
    derive_params(0.34, 5741, pow(conv.numerator, -1, 5741))


def test_derive_params_rejects():
    with pytest.raises(NonCoprimeError):
        derive_params(Fraction(1, 3), 10001, 73)
    with pytest.raises(WindowViolation):
        derive_params(Fraction(1, 3), 10001, 100, x=10**7)
    with pytest.raises(WindowViolation):
        derive_params(Fraction(0), 10001, 100)


def test_record_round_trip():
    p = derive_params(Fraction(1, 4), 9973, 1234)
    assert InstanceParams.from_record(p.to_record()) == p


def test_phi_examples():
    p = b_instance(100)
    assert (p.q, p.a, p.a_inv, p.z) == (10001, 100, 9901, 100)
    assert phi(5000, p) == 1
    assert phi(1000, p) == 0
    assert 0 < phi(3000, p) < 1
    assert phi(3000, p) == w_eval(0.30)


def test_membership_examples():
    p = b_instance(100)
    assert membership(305030, p)
    assert not membership(305031, p)
    assert not membership(100, p)


def test_enumeration_matches_brute_force():
    p = b_instance(100)
    got = members(p)
    assert got.tolist() == brute_members(p)
    assert all(membership(int(n), p) for n in got[::97])


def test_enumeration_random_instances():
    rng = random.Random(3)
    for _ in range(5):
        p = random_instance(rng, q_range=(500, 3000))
        assert members(p).tolist() == brute_members(p)


def test_sandwich():
    p = b_instance(30)
    lo, hi = math.floor(p.x / 4), math.floor(p.x)
    n = np.arange(lo + 1, hi)
    f = phi(n, p)
    m = np.array([membership(int(v), p) for v in n])
    assert np.all((f >= 0) & (f <= m))


def test_phi_periodic():
    p = b_instance(50)
    n = np.arange(1, 50000)
    assert np.array_equal(phi(n, p), phi(n + p.q, p))


def test_count_e2_b10():
    p = b_instance(10)
    count, ratio = count_e2_in_A(p)
    assert count == sum(1 for n in brute_members(p) if is_e2(n))
    assert ratio == pytest.approx(count * math.log(10) / 100)


def test_ceiling():
    with pytest.raises(CeilingExceeded):
        list(enumerate_A(b_instance(100), ceiling=10**5))
