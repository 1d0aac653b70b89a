import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from bargmann.errors import NoClosedFormError, ParameterError, UnsupportedError
from bargmann.psi import PsiSpec, psi_eval
from bargmann.qcalc import first_negative_zero, q_exp
from bargmann.representation import psi_factorial
from bargmann.weight import (
    bernoulli_polynomial,
    bernoulli_solution,
    closed_form_weight,
    ff_equation_residual,
    mellin_growth_test,
    mellin_moment,
    moment_targets,
    naive_q_exp_candidate,
    periodic_multiplier_family,
    positivity_scan,
    powerq_moment_sign,
    verify_moments,
)


def spec(family, **params):
    return PsiSpec(family, params)


POWERQ = spec("PowerQ", lam=1.5, q=0.5)


def test_moment_targets_examples():
    assert moment_targets(spec("Usual"), (3, 3))[3] == 6
    assert moment_targets(spec("SymBracket", q=2.0), (3, 3))[3] == pytest.approx(13.125)
    for s in (spec("Usual"), POWERQ, spec("RingInv", a=4.0, q=0.5)):
        assert moment_targets(s, (0, 0))[0] == 1


def test_targets_agree_with_factorials():
    t = moment_targets(POWERQ, (-6, 8))
    assert all(t[n] == psi_factorial(POWERQ, n) for n in t)


def test_usual_weight():
    w = closed_form_weight(spec("Usual"))
    assert w.kind == "Density" and w.support == (0.0, math.inf)
    xs = np.array([0.1, 1.0, 5.0])
    np.testing.assert_allclose(w(xs), np.exp(-xs), rtol=1e-14)
    r = verify_moments(w, spec("Usual"), (0, 12), tol=1e-10)
    assert r.method == "quadrature" and r.passed and r.max_rel_error < 1e-10
    for row in r.rows:
        assert row.computed == pytest.approx(special.gamma(row.n + 1), rel=1e-10)


def test_powerq_log_normal_values():
    w = closed_form_weight(POWERQ)
    lam, q = 1.5, 0.5
    x = np.array([0.05, 0.7, 3.0, 40.0])
    L = np.log(x / lam)
    shape = np.exp(L**2 / (2 * np.log(q)) - L / 2)
    ratio = w(x) / shape
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-13)


def test_powerq_moments_and_sign():
    w = closed_form_weight(POWERQ)
    r = verify_moments(w, POWERQ, (-6, 8), tol=1e-8)
    assert r.passed
    for row in r.rows:
        n = row.n
        assert row.computed == pytest.approx(1.5**n * 0.5 ** (-n * (n + 1) / 2), rel=1e-8)
    sign = powerq_moment_sign(w, POWERQ)
    assert sign["lambda_exponent"] == "+n"
    assert sign["max_rel_error"]["+n"] < 1e-8 < sign["max_rel_error"]["-n"]


def test_ring_plus_atoms():
    s = spec("RingPlus", a=4.0, q=2.0)
    w = closed_form_weight(s)
    atoms = w.atoms(6)
    assert [loc for loc, _ in atoms] == [4.0, 8.0, 16.0, 32.0, 64.0, 128.0]
    assert all(m > 0 for _, m in atoms)
    r = verify_moments(w, s, (0, 10), tol=1e-12)
    assert r.method == "atomic-sum" and r.passed


def test_ring_inv_atoms():
    s = spec("RingInv", a=4.0, q=0.5)
    w = closed_form_weight(s)
    locs = [loc for loc, _ in w.atoms(5)]
    assert locs == pytest.approx([0.25 * 0.5**n for n in range(5)], rel=1e-15)
    assert verify_moments(w, s, (0, 10), tol=1e-12).passed


@pytest.mark.parametrize("s", [spec("RingPlus", a=4.0, q=2.0), spec("RingInv", a=4.0, q=0.5)], ids=["plus", "inv"])
def test_atomic_recursion_from_raw_sums(s):
    # independent of the module's summation: add the atoms directly
    w = closed_form_weight(s)
    atoms = w.atoms(60)

    def mom(rho):
        return math.fsum(m * loc ** (rho - 1) for loc, m in atoms)

    assert mom(1.0) == pytest.approx(1.0, rel=1e-14)
    for n in range(0, 11):
        assert mom(n + 2.0) == pytest.approx(psi_eval(s, float(n + 1)) * mom(n + 1.0), rel=1e-12)


def test_atomic_partial_sums_are_monotone():
    w = closed_form_weight(spec("RingPlus", a=4.0, q=2.0))
    atoms = w.atoms(40)
    partial = np.cumsum([m * loc**3 for loc, m in atoms])
    assert np.all(np.diff(partial) >= 0)
    val, remainder, ok = mellin_moment(w, 4.0)
    assert ok and remainder < 1e-15


def test_sym_bracket_weight():
    s = spec("SymBracket", q=1.5)
    w = closed_form_weight(s)
    assert positivity_scan(w).nonnegative
    r = verify_moments(w, s, (0, 10), tol=1e-6)
    assert r.passed
    assert w.params["analytic_normalization"] == pytest.approx(w.normalization, rel=1e-10)


def test_naive_candidate_goes_negative():
    q = 1.5
    verdict = positivity_scan(naive_q_exp_candidate(q))
    assert not verdict.nonnegative
    x, fx = verdict.witness
    assert fx < 0 and x > first_negative_zero("symmetric", q)
    assert q_exp("symmetric", q, -x) < 0


def test_jackson_weight():
    s = spec("JacksonBracket", q=2.0)
    w = closed_form_weight(s)
    assert positivity_scan(w).nonnegative
    assert verify_moments(w, s, (0, 10), tol=1e-6).passed
    x = np.array([0.5, 2.0, 7.0])
    ratio = w(x) * np.array([q_exp("jackson", 2.0, 2.0 * v) for v in x])
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-12)


def test_monomial_two_matches_bessel():
    w = closed_form_weight(spec("Monomial", n=2))
    x = np.array([0.01, 0.3, 1.0, 4.0, 30.0])
    oracle = 2 * special.k0(2 * np.sqrt(x))
    np.testing.assert_allclose(w(x), oracle, rtol=1e-10)
    r = verify_moments(w, spec("Monomial", n=2), (0, 8), tol=1e-6)
    assert r.passed


def test_monomial_three_matches_meijer_g():
    w = closed_form_weight(spec("Monomial", n=3))
    for x in (0.05, 0.8, 3.0):
        oracle = float(mpmath.meijerg([[], []], [[0, 0, 0], []], x))
        assert w(x) == pytest.approx(oracle, rel=1e-8)
    assert verify_moments(w, spec("Monomial", n=3), (0, 5), tol=1e-6).passed


def test_monomial_four_is_moment_only():
    s = spec("Monomial", n=4)
    w = closed_form_weight(s)
    r = verify_moments(w, s, (0, 6), tol=1e-12)
    assert r.method == "closed-form" and r.passed
    with pytest.raises(UnsupportedError):
        w(1.0)


def test_no_closed_form():
    with pytest.raises(NoClosedFormError):
        closed_form_weight(spec("QOscPrime", q=0.5, sigma=0.3))


@pytest.mark.parametrize("s", [POWERQ, spec("JacksonBracket", q=2.0), spec("SymBracket", q=1.5)], ids=lambda s: s.family)
def test_ff_equation(s):
    w = closed_form_weight(s)
    assert ff_equation_residual(w, s, np.geomspace(0.1, 10, 25)) < 1e-10


def test_ff_equation_unsupported_for_ring():
    s = spec("RingPlus", a=4.0, q=2.0)
    with pytest.raises(UnsupportedError):
        ff_equation_residual(closed_form_weight(s), s, [1.0])


def test_periodic_multiplier():
    w = closed_form_weight(POWERQ)
    same = periodic_multiplier_family(w, 0.0)
    x = np.geomspace(0.01, 100, 7)
    np.testing.assert_allclose(same(x), w(x), rtol=1e-12)
    wp = periodic_multiplier_family(w, 0.5, 1)
    assert positivity_scan(wp).nonnegative
    assert not np.allclose(wp(x), w(x))
    r = verify_moments(wp, POWERQ, (-4, 6), tol=1e-6)
    for n, ratio in r.ratios().items():
        assert ratio == pytest.approx(psi_eval(POWERQ, float(n)), rel=1e-8)
    with pytest.raises(ParameterError):
        periodic_multiplier_family(w, 1.0)


def test_bernoulli_polynomials():
    assert bernoulli_polynomial(2) == [Fraction(1, 6), Fraction(-1), Fraction(1)]
    B2 = bernoulli_polynomial(2)
    assert sum(B2) == B2[0]  # B2(1) = B2(0)
    for n in range(1, 9):
        Bn = bernoulli_polynomial(n)
        for x in (Fraction(0), Fraction(3, 7), Fraction(2)):
            diff = sum(c * ((x + 1) ** k - x**k) for k, c in enumerate(Bn))
            assert diff == n * x ** (n - 1)


def test_bernoulli_solution_log_normal_case():
    lam, q = 1.5, 0.5
    sol = bernoulli_solution([math.log(lam), -math.log(q)])
    rhos = np.array([0.3, 1.7, 4.0])
    target = rhos * math.log(lam) - 0.5 * (rhos**2 - rhos) * math.log(q)
    d = sol.log_value(rhos) - target
    np.testing.assert_allclose(d, d[0], atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    coeffs=st.lists(st.floats(-1, 1), min_size=1, max_size=5),
    lead=st.floats(0.05, 1),
)
def test_bernoulli_difference_identity(coeffs, lead):
    if len(coeffs) % 2 == 0:
        coeffs = coeffs[:-1]
    a = [*coeffs, lead]
    sol = bernoulli_solution(a)
    for rho in (0.3, 1.7, 4.0):
        lhs = sol.log_value(rho + 1) - sol.log_value(rho)
        rhs = sum(c * rho**k for k, c in enumerate(a))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_growth_parity_rule():
    status = []
    for p in range(4):
        sol = bernoulli_solution([0.0] * (2 * p + 1) + [0.3])
        v = mellin_growth_test(sol)
        assert v.confirmed
        status.append(v.status)
    assert status == ["Exists", "NonExistent", "Exists", "NonExistent"]
    assert mellin_growth_test(bernoulli_solution([0.1, 0.2, 0.1, 0.4])).reason == "Mellin growth on imaginary axis"


def test_growth_rejects_bad_leading_coefficient():
    with pytest.raises(ParameterError):
        bernoulli_solution([0.0, 0.0])
    with pytest.raises(ParameterError):
        bernoulli_solution([0.0, 1.0, 2.0])


def test_exp_poly_dispatch():
    odd = closed_form_weight(PsiSpec("ExpPoly", {"a0": 0, "a1": 0.1, "a2": 0, "a3": 0.2}))
    assert odd.kind == "NonExistent" and odd.reason == "Mellin growth on imaginary axis"
    lin = closed_form_weight(PsiSpec("ExpPoly", {"a0": math.log(1.5), "a1": math.log(2.0)}))
    assert lin.kind == "Density"
    x = np.geomspace(0.1, 10, 5)
    np.testing.assert_allclose(lin(x), closed_form_weight(POWERQ)(x), rtol=1e-12)
    even = closed_form_weight(PsiSpec("ExpPoly", {"a0": 0, "a1": 0, "a2": 0, "a3": 0, "a4": 0, "a5": 0.3}))
    assert even.kind == "Inconclusive"
    with pytest.raises(UnsupportedError):
        verify_moments(odd, odd.spec, (0, 3))


def test_positivity_scan_rejects_atoms():
    with pytest.raises(UnsupportedError):
        positivity_scan(closed_form_weight(spec("RingPlus", a=4.0, q=2.0)))
