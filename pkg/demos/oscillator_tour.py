"""
The ordinary oscillator, end to end
===================================

psi(x) = x gives the textbook ladder: factorials n!, Bargmann kernel e^x and
the weight e^(-x).  Every deformed family below reuses the same pipeline.
"""

import cmath

import numpy as np

from bargmann.coherent import coherent_domain, coherent_vector, eigen_residual
from bargmann.kernel import kernel_eval
from bargmann.psi import PsiSpec, classify
from bargmann.representation import build_truncated, psi_factorial, verify_algebra
from bargmann.weight import closed_form_weight, verify_moments

usual = PsiSpec("Usual", {})
print(classify(usual))

# the factorial recursion value(n) = psi(n) value(n - 1)
print([psi_factorial(usual, n) for n in range(7)])

# a truncated matrix pair satisfies a^dagger a = psi(N) away from the cut
rep = build_truncated(usual, 0, 12)
alg = verify_algebra(rep)
print(f"a^dagger a relation {alg.ata_rel:.1e}, [a, a^dagger] rows {alg.comm_a_rel:.1e}")

# coherent states exist on the whole plane for the lowering operator
dom = coherent_domain(usual)
print(dom.operator, dom.r1, dom.r2, dom.shape)
z = 1.2 * cmath.exp(0.5j)
v = coherent_vector(usual, z)
print(f"eigen residual {eigen_residual(rep, v):.1e}, norm^2 {v.norm2:.6f}")

# the kernel resums the norm: G(|z|^2) = e^(|z|^2)
print(kernel_eval(usual, abs(z) ** 2).real, np.exp(abs(z) ** 2))

# and the weight e^(-x) has moments n!
report = verify_moments(closed_form_weight(usual), usual, (0, 8), tol=1e-10)
for row in report.rows:
    print(row.n, row.target, f"{row.computed:.12g}")
