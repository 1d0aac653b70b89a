import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bargmann.errors import ParameterError
from bargmann.kernel import kernel_eval
from bargmann.psi import PsiSpec
from bargmann.qcalc import (
    first_negative_zero,
    q_derivative,
    q_exp,
    q_exp_product,
    q_factorial,
    q_integral,
    q_number,
    q_resolution_check,
)


def test_q_number_examples():
    assert q_number(2, 2.0) == pytest.approx(2.5, rel=1e-15)
    assert q_number(2, 2.0, "jackson") == pytest.approx(3.0, rel=1e-15)
    assert q_number(0, 3.7) == 0.0
    with pytest.raises(ParameterError):
        q_number(1, 1.0)
    with pytest.raises(ParameterError):
        q_number(1, 2.0, "other")


def test_q_exp_examples():
    assert q_exp("jackson", 2.0, 0.0) == 1.0
    assert q_exp("symmetric", 1.5, 0.0) == 1.0
    assert q_exp("jackson", 2.0, -2.0) == pytest.approx(0.0, abs=1e-13)
    assert q_exp_product(2.0, -2.0) == 0.0
    sym = q_exp("symmetric", 1.5, 1.0)
    assert sym == pytest.approx(kernel_eval(PsiSpec("SymBracket", {"q": 1.5}), 1.0).real, rel=1e-13)
    assert sym == pytest.approx(sum(1 / q_factorial(n, 1.5) for n in range(40)), rel=1e-14)


def test_first_negative_zero_examples():
    assert first_negative_zero("jackson", 2.0) == 2.0
    assert first_negative_zero("jackson", 4.0) == pytest.approx(4 / 3, rel=1e-15)
    zeta = first_negative_zero("symmetric", 1.5)
    assert abs(q_exp("symmetric", 1.5, -zeta)) < 1e-9
    # nothing closer to the origin
    assert all(q_exp("symmetric", 1.5, -zeta * k / 50) > 0 for k in range(50))


def test_q_integral_examples():
    assert q_integral("jackson", 2.0, lambda t: 1.0, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert q_integral("jackson", 2.0, lambda t: t, 1.0) == pytest.approx(1 / 3, rel=1e-15)
    assert q_integral("symmetric", 0.5, lambda t: 1.0, 1.0) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("variant, q", [("jackson", 2.0), ("jackson", 1.3), ("symmetric", 0.5), ("symmetric", 1.7)])
@pytest.mark.parametrize("m", range(7))
def test_derivative_inverts_integral(variant, q, m):
    f = lambda t: t**m  # noqa: E731
    F = lambda x: q_integral(variant, q, f, x)  # noqa: E731
    for x in (0.3, 1.0, 2.5):
        assert q_derivative(variant, q, F, x) == pytest.approx(f(x), rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(q=st.floats(1.1, 6.0), x=st.floats(-0.5, 10.0))
def test_jackson_product_matches_series(q, x):
    x = x * first_negative_zero("jackson", q)
    if x > 10:
        x = 10.0
    assert q_exp_product(q, x) == pytest.approx(q_exp("jackson", q, x), rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(q=st.floats(1.05, 4.0), x=st.floats(-3.0, 3.0))
def test_symmetric_invariance(q, x):
    assert q_number(x, q) == pytest.approx(q_number(x, 1 / q), rel=1e-12, abs=1e-15)
    assert q_exp("symmetric", q, x) == pytest.approx(q_exp("symmetric", 1 / q, x), rel=1e-12, abs=1e-15)


def test_symmetric_resolution_invariance():
    a = q_resolution_check("symmetric", 1.5, (0, 6))
    b = q_resolution_check("symmetric", 1 / 1.5, (0, 6))
    for ra, rb in zip(a.rows, b.rows):
        assert ra.computed == pytest.approx(rb.computed, rel=1e-12)


def test_jackson_zero_at_second_node():
    # Exp_q vanishes at -q^p zeta; p = 1, q = 2 gives x = -4
    q = 2.0
    scale = max(abs(1 + (-4.0) * (1 - 1 / q) * q ** (-p)) for p in range(4))
    assert abs(q_exp_product(q, -4.0)) <= 1e-12 * scale


def test_resolution_normalization():
    r = q_resolution_check("jackson", 2.0, (0, 0))
    assert r.rows[0].computed == pytest.approx(1.0, rel=1e-14)
    r = q_resolution_check("symmetric", 1.5, (0, 0))
    assert r.rows[0].computed == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("q", [2.0, 3.0])
def test_jackson_q_integral_moments_closed_form(q):
    # the q-integral of Exp_q(-x) x^n over [0, zeta] is (n)! q^(-n(n+1)/2),
    # so it meets the (n)! target only at n = 0
    r = q_resolution_check("jackson", q, (0, 8))
    for row in r.rows:
        n = row.n
        assert row.computed == pytest.approx(q_factorial(n, q, "jackson") * q ** (-n * (n + 1) / 2), rel=1e-12)
    assert not r.passed


def test_q_factorial_rejects_negative():
    with pytest.raises(ParameterError):
        q_factorial(-1, 2.0)
    assert math.isclose(q_factorial(3, 2.0), 13.125)
