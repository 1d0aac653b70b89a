"""Bargmann representations for deformed harmonic oscillators.

Given a structure function ``psi`` with ``a^dagger a = psi(N)``, the package
classifies the representation, finds where coherent states exist, evaluates
the reproducing kernel, and builds or refutes weight functions whose Mellin
moments give a resolution of unity.
"""

from .coherent import CoherentDomain, CoherentVector, coherent_domain, coherent_vector, eigen_residual
from .errors import (
    BargmannError,
    ConvergenceError,
    DomainError,
    NoClosedFormError,
    ParameterError,
    UnclassifiableError,
    UndecidedError,
    UnsupportedError,
)
from .kernel import (
    BargmannFunction,
    kernel_eval,
    kernel_functional_check,
    reproduce_via_weight,
    schwarz_check,
    state_to_function,
)
from .psi import FAMILIES, PsiSpec, SpectrumInfo, classify, find_zeros, psi_eval, psi_limits, su_q2
from .qcalc import first_negative_zero, q_derivative, q_exp, q_factorial, q_integral, q_number, q_resolution_check
from .reports import MomentReport
from .representation import TruncatedRep, build_truncated, psi_factorial, verify_algebra
from .weight import (
    WeightObject,
    bernoulli_solution,
    closed_form_weight,
    ff_equation_residual,
    mellin_growth_test,
    moment_targets,
    naive_q_exp_candidate,
    periodic_multiplier_family,
    positivity_scan,
    verify_moments,
)

__version__ = "0.1.0"
