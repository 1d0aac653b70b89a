"""
Jackson brackets: density versus q-integral
===========================================

For psi(x) = (q^x - 1)/(q - 1) the density 1/Exp_q(qx) on (0, inf) has the
right ordinary moments.  The q-integral of Exp_q(-x) x^n up to the first
zero does not: it comes out as (n)! q^(-n(n+1)/2), matching only at n = 0.
"""

from bargmann.psi import PsiSpec
from bargmann.qcalc import first_negative_zero, q_factorial, q_resolution_check
from bargmann.weight import closed_form_weight, positivity_scan, verify_moments

q = 2.0
jack = PsiSpec("JacksonBracket", {"q": q})
w = closed_form_weight(jack)
print("density positive:", positivity_scan(w).nonnegative)
print("density moments:", verify_moments(w, jack, (0, 10), tol=1e-6).max_rel_error)

print("q-integral upper limit:", first_negative_zero("jackson", q))
report = q_resolution_check("jackson", q, (0, 8))
for row in report.rows:
    n = row.n
    closed = q_factorial(n, q, "jackson") * q ** (-n * (n + 1) / 2)
    print(n, f"target {row.target:.6g}", f"q-integral {row.computed:.6g}", f"closed form {closed:.6g}")
