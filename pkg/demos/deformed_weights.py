"""
Weights for deformed factorials
===============================

A positive weight F with Mellin moments equal to the factorials turns the
coherent states into a resolution of the identity.  Here we look at the
log-normal weight, its non-uniqueness, and a q-exponential that only looks
like a weight.
"""

import numpy as np

from bargmann.psi import PsiSpec, psi_eval
from bargmann.qcalc import first_negative_zero
from bargmann.weight import (
    closed_form_weight,
    naive_q_exp_candidate,
    periodic_multiplier_family,
    positivity_scan,
    powerq_moment_sign,
    verify_moments,
)

# psi(x) = lam q^(-x): the factorials grow like q^(-n^2/2), the weight is log-normal
powerq = PsiSpec("PowerQ", {"lam": 1.5, "q": 0.5})
w = closed_form_weight(powerq)
x = np.geomspace(0.01, 100, 5)
print(np.c_[x, w(x)])

report = verify_moments(w, powerq, (-6, 8), tol=1e-8)
print("moments", report.passed, f"{report.max_rel_error:.1e}")
sign = powerq_moment_sign(w, powerq)
print("moments carry lambda^" + sign["lambda_exponent"], sign["max_rel_error"])

# multiplying by 1 + eps sin(2 pi log(x)/log q) leaves every moment unchanged
wp = periodic_multiplier_family(w, 0.5, 1)
rp = verify_moments(wp, powerq, (-4, 6), tol=1e-6)
for n, ratio in rp.ratios().items():
    print(n, f"{ratio:.10g}", f"{psi_eval(powerq, float(n)):.10g}")
print("still positive:", positivity_scan(wp).nonnegative)

# symmetric bracket, q = 1.5: a Gaussian in log x does the job
sym = PsiSpec("SymBracket", {"q": 1.5})
ws = closed_form_weight(sym)
print("positive:", positivity_scan(ws, n_points=4096).nonnegative)
print("moments:", verify_moments(ws, sym, (0, 10), tol=1e-6).max_rel_error)

# the q-exponential at -x solves the same difference equation but changes sign
naive = positivity_scan(naive_q_exp_candidate(1.5))
print("first zero of e_q(-x):", first_negative_zero("symmetric", 1.5))
print("naive candidate nonnegative:", naive.nonnegative, "witness:", naive.witness)
