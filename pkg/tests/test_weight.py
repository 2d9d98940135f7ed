import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from e2lab.weight import (
    W_HAT_0,
    SmoothWeight,
    default_table,
    poisson_check,
    w_deriv,
    w_eval,
    w_hat,
    w_hat_array,
    transition,
)


def test_w_values():
    assert w_eval(0.5) == 1
    assert w_eval(0.1) == 0
    v = float(w_eval(0.30))
    assert 0 < v < 1
    # the transition on [1/4, 1/3] evaluated at 0.30
    assert v == pytest.approx(float(transition(12 * (0.30 - 0.25))), abs=1e-15)


def test_w_sandwich_and_plateaus():
    x = np.linspace(-1, 2, 300001)
    w = w_eval(x)
    assert np.all((w >= 0) & (w <= 1))
    assert np.all(w[(x <= 0.25) | (x >= 0.75)] == 0)
    assert np.all(w[(x >= 1 / 3) & (x <= 2 / 3)] == 1)


def test_w_symmetric():
    x = np.linspace(0, 0.5, 1001)
    assert np.allclose(w_eval(x), w_eval(1 - x), atol=1e-15)


def test_derivative_bounded_and_matches_difference():
    x = np.linspace(0.26, 0.74, 997)
    h = 1e-6
    fd = (w_eval(x + h) - w_eval(x - h)) / (2 * h)
    assert np.allclose(w_deriv(x), fd, atol=1e-5)
    assert SmoothWeight().max_deriv() < 30


def test_w_hat_zero():
    assert w_hat(0) == pytest.approx(5 / 12, abs=1e-12)
    assert W_HAT_0 == 5 / 12


def test_w_hat_decay():
    assert abs(w_hat(1000.0)) <= 1e-6
    assert abs(w_hat_array(-1000.0)) <= 1e-6


@given(st.floats(-60, 60))
def test_w_hat_conjugate(t):
    a, b = complex(w_hat_array(t)), complex(w_hat_array(-t))
    assert abs(a - b.conjugate()) < 1e-14


def test_array_matches_adaptive():
    for t in (0.0, 0.3, 1.7, 5.0, 12.5, 40.0):
        assert abs(complex(w_hat_array(t)) - w_hat(t)) < 1e-11


def test_table_matches_exact():
    table = default_table()
    t = np.linspace(-80, 80, 2001)
    assert np.max(np.abs(table(t) - w_hat_array(t))) < 1e-9


def test_decay_constants_hold():
    table = default_table()
    cs = table.decay_constants()
    t = table.grid
    v = np.abs(table.values)
    for b, c in cs.items():
        env = np.minimum(1.0, np.where(t > 0, t, 1.0) ** (-float(b)))
        assert np.all(v <= c * env * (1 + 1e-12))
        assert math.isfinite(c)


def test_poisson_examples():
    lhs, rhs, d = poisson_check(1.0, 0.0)
    assert lhs == 0 and d <= 1e-8
    lhs, rhs, d = poisson_check(0.5, 0.0, truncation=200)
    assert lhs == 1 and d <= 1e-8
    lhs, rhs, d = poisson_check(1.0, 0.5)
    assert lhs == 1 and d <= 1e-8


def test_poisson_short_truncation():
    # 50 dual terms at v = 1 only reach |t| = 50, where What is still ~1e-6
    assert 1e-6 < poisson_check(1.0, 0.0, truncation=50)[2] < 1e-4
    assert 1e-6 < poisson_check(1.0, 0.5, truncation=50)[2] < 1e-3


@pytest.mark.parametrize("form", [1, 2])
def test_poisson_random(form):
    rng = np.random.default_rng(7)
    for v, u in zip(rng.uniform(0.1, 10, 30), rng.uniform(-2, 2, 30)):
        assert poisson_check(v, u, form=form)[2] <= 1e-8


def test_poisson_rejects_bad_v():
    with pytest.raises(ValueError):
        poisson_check(0.0, 0.0)
