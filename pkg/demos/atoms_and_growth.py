"""
Atomic weights and the growth test
==================================

When psi stays bounded the factorials grow geometrically and the weight
collapses onto a lattice of atoms.  When psi is exp of a polynomial the
parity of the degree decides whether any weight can exist.
"""

from bargmann.psi import PsiSpec, psi_eval
from bargmann.weight import bernoulli_solution, closed_form_weight, mellin_growth_test, verify_moments

for spec in (PsiSpec("RingPlus", {"a": 4.0, "q": 2.0}), PsiSpec("RingInv", {"a": 4.0, "q": 0.5})):
    w = closed_form_weight(spec)
    print(spec.family, "atoms:", [(f"{loc:.4g}", f"{m:.3e}") for loc, m in w.atoms(5)])
    report = verify_moments(w, spec, (0, 11), tol=1e-12)
    worst = max(abs(r / psi_eval(spec, float(n)) - 1) for n, r in report.ratios().items())
    print(f"  recursion error {worst:.1e} via {report.method}")

# psi(x) = exp(a0 + a1 x + ... + a_m x^m): log value(rho) solves a difference
# equation with Bernoulli-polynomial solutions; its growth along the
# imaginary axis rules out a Mellin transform when the top degree is odd
for p in range(4):
    sol = bernoulli_solution([0.1] * (2 * p + 1) + [0.3])
    v = mellin_growth_test(sol)
    print(f"degree {2 * p + 1} exponent: {v.status} ({v.reason})")
