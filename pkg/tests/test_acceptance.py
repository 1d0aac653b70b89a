"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run directly (``python3 tests/test_acceptance.py``) for the summary alone.
"""

import cmath
import math
import time

import numpy as np
import pytest

from bargmann.coherent import coherent_domain, coherent_vector, eigen_residual
from bargmann.kernel import kernel_eval, kernel_functional_check
from bargmann.psi import PsiSpec, classify, psi_eval, su_q2
from bargmann.qcalc import q_factorial, q_resolution_check
from bargmann.representation import build_truncated, verify_algebra
from bargmann.weight import (
    bernoulli_solution,
    closed_form_weight,
    mellin_growth_test,
    naive_q_exp_candidate,
    periodic_multiplier_family,
    positivity_scan,
    powerq_moment_sign,
    verify_moments,
)


def spec(family, **params):
    return PsiSpec(family, params)


def ratio_error(report, s):
    """Worst relative deviation of F^(n)/F^(n-1) from psi(n)."""
    return max(abs(r / psi_eval(s, float(n)) - 1) for n, r in report.ratios().items())


def criterion_1():
    t0 = time.perf_counter()
    s = spec("Usual")
    moments = verify_moments(closed_form_weight(s), s, (0, 12), tol=1e-10)
    xs = np.linspace(0, 4, 41)
    kerr = max(abs(kernel_eval(s, x).real / math.exp(x) - 1) for x in xs)
    dt = time.perf_counter() - t0
    ok = moments.passed and moments.max_rel_error < 1e-10 and kerr < 1e-12 and dt < 1.0
    return ok, f"moments {moments.max_rel_error:.2e}, kernel {kerr:.2e}, {dt:.2f}s"


def criterion_2():
    t0 = time.perf_counter()
    s = spec("PowerQ", lam=1.5, q=0.5)
    w = closed_form_weight(s)
    report = verify_moments(w, s, (-7, 8), tol=1e-8)
    rerr = ratio_error(report, s)  # ratios cover n in [-6, 8]
    sign = powerq_moment_sign(w, s, (-6, 8))
    dt = time.perf_counter() - t0
    ok = report.all_converged and rerr < 1e-8 and sign["lambda_exponent"] == "+n" and dt < 5.0
    return ok, f"ratio {rerr:.2e}, moments carry lambda^{sign['lambda_exponent']}, {dt:.2f}s"


def criterion_3():
    s = spec("PowerQ", lam=1.5, q=0.5)
    w = periodic_multiplier_family(closed_form_weight(s), 0.5, 1)
    report = verify_moments(w, s, (-5, 6), tol=1e-6)
    rerr = ratio_error(report, s)  # ratios cover n in [-4, 6]
    pos = positivity_scan(w)
    ok = report.all_converged and rerr < 1e-6 and pos.nonnegative
    return ok, f"ratio {rerr:.2e}, positive on {pos.n_points} points: {pos.nonnegative}"


def criterion_4():
    t0 = time.perf_counter()
    worst = 0.0
    converged = True
    for s in (spec("RingPlus", a=4.0, q=2.0), spec("RingInv", a=4.0, q=0.5)):
        report = verify_moments(closed_form_weight(s), s, (0, 11), tol=1e-12)
        assert report.method == "atomic-sum"
        converged &= report.all_converged
        # F^(n) = psi(n) F^(n-1) for n in [1, 11], with psi(n) = a + q^n or 1/(q^n + a)
        worst = max(worst, ratio_error(report, s))
    dt = time.perf_counter() - t0
    ok = converged and worst < 1e-12 and dt < 1.0
    return ok, f"recursion {worst:.2e}, {dt:.2f}s"


def criterion_5():
    t0 = time.perf_counter()
    s = spec("SymBracket", q=1.5)
    w = closed_form_weight(s)
    pos = positivity_scan(w, n_points=4096)
    report = verify_moments(w, s, (0, 10), tol=1e-6)
    naive = positivity_scan(naive_q_exp_candidate(1.5))
    dt = time.perf_counter() - t0
    ok = pos.nonnegative and report.passed and not naive.nonnegative and dt < 10.0
    wit = naive.witness
    return ok, (f"positive {pos.nonnegative}, moments {report.max_rel_error:.2e}, "
                f"naive witness F({wit[0]:.4g}) = {wit[1]:.3g}, {dt:.2f}s")


def criterion_6():
    s = spec("JacksonBracket", q=2.0)
    w = closed_form_weight(s)
    pos = positivity_scan(w)
    report = verify_moments(w, s, (0, 10), tol=1e-6)
    qres = q_resolution_check("jackson", 2.0, (0, 10), tol=1e-9)
    targets_match = all(r.target == pytest.approx(q_factorial(r.n, 2.0, "jackson"), rel=1e-14) for r in qres.rows)
    ok = pos.nonnegative and report.passed and qres.passed and targets_match
    return ok, (f"positive {pos.nonnegative}, density moments {report.max_rel_error:.2e}, "
                f"q-integral moments {qres.max_rel_error:.2e} (tol 1e-9)")


def criterion_7():
    s = spec("Monomial", n=2)
    report = verify_moments(closed_form_weight(s), s, (0, 8), tol=1e-6)
    oracle = max(abs(r.target / math.factorial(r.n) ** 2 - 1) for r in report.rows)
    ok = report.passed and oracle < 1e-14
    return ok, f"moments {report.max_rel_error:.2e} against (n!)^2"


def criterion_8():
    expected = {0: "Exists", 1: "NonExistent", 2: "Exists", 3: "NonExistent"}
    got = {}
    for p in expected:
        sol = bernoulli_solution([0.1] * (2 * p + 1) + [0.3])
        v = mellin_growth_test(sol)
        got[p] = v.status if v.confirmed else "unconfirmed"
    hits = sum(got[p] == expected[p] for p in expected)
    return hits == 4, f"{hits}/4 parity cases: {got}"


BARGMANN_FAMILIES = [
    spec("Usual"),
    spec("QOsc", q=0.5, sigma=1.0),
    spec("QOscPrime", q=0.5, sigma=-1.0),
    spec("PowerQ", lam=1.5, q=0.5),
    PsiSpec("ExpPoly", {"a0": 0.2, "a1": 0.4}),
    spec("RingPlus", a=4.0, q=2.0),
    spec("RingInv", a=4.0, q=0.5),
    spec("SymBracket", q=1.5),
    spec("JacksonBracket", q=2.0),
    spec("Monomial", n=2),
]


def criterion_9():
    alg = res = fun = 0.0
    for s in BARGMANN_FAMILIES:
        rep = build_truncated(s)
        a = verify_algebra(rep)
        alg = max(alg, a.comm_a_rel, a.comm_adag_rel, a.ata_rel, a.aat_rel)
        d = coherent_domain(s)
        r = (d.r1 + min(d.r2, d.r1 + 2)) / 2
        zs = [r * cmath.exp(2j * math.pi * k / 5 + 0.1j) for k in range(5)]
        for z in zs:
            res = max(res, eigen_residual(rep, coherent_vector(s, z)))
        fun = max(fun, kernel_functional_check(s, [z * z.conjugate() for z in zs[:1]] + [z * z for z in zs[1:3]]))
    ok = alg < 1e-12 and res < 1e-10 and fun < 1e-10
    return ok, f"{len(BARGMANN_FAMILIES)} families: algebra {alg:.2e}, eigen {res:.2e}, functional {fun:.2e}"


def criterion_10():
    rows = []
    for l in (1, 2, 3):
        s = su_q2(2.0, l)
        info = classify(s)
        dom = coherent_domain(s)
        rows.append(info.kind == "Finite" and info.dimension == 2 * l + 1 and dom.operator == "None")
    return all(rows), f"l=1,2,3 finite with dimension 2l+1 and no coherent domain: {rows}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def report_line(k, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k, capsys):
    ok, detail = CRITERIA[k - 1]()
    with capsys.disabled():
        print("\n" + report_line(k, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    for k, fn in enumerate(CRITERIA, 1):
        print(report_line(k, *fn()))
