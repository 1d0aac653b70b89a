import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bargmann.coherent import coherent_domain, coherent_vector, eigen_residual, series_window
from bargmann.errors import DomainError, UndecidedError
from bargmann.psi import PsiSpec, su_q2
from bargmann.representation import build_truncated


def spec(family, **params):
    return PsiSpec(family, params)


WITH_A = [
    spec("Usual"),
    spec("QOsc", q=0.5, sigma=1.0),
    spec("SymBracket", q=2.0),
    spec("SymBracket", q=1.5),
    spec("JacksonBracket", q=2.0),
    spec("Monomial", n=2),
    spec("PowerQ", lam=1.5, q=0.5),
    spec("RingPlus", a=4.0, q=2.0),
    spec("RingInv", a=4.0, q=0.5),
    PsiSpec("ExpPoly", {"a0": 0.2, "a1": 0.4}),
]


def test_domain_examples():
    d = coherent_domain(spec("PowerQ", lam=1.5, q=0.5))
    assert (d.operator, d.shape, d.r1, d.r2) == ("A", "PuncturedPlane", 0.0, math.inf)
    d = coherent_domain(spec("RingPlus", a=4.0, q=2.0))
    assert (d.operator, d.r1, d.r2) == ("A", 2.0, math.inf)
    assert coherent_domain(su_q2(2.0, 1)).operator == "None"


def test_domain_half_up_disc():
    d = coherent_domain(spec("QOscPrime", q=0.5, sigma=-1.0))
    assert d.operator == "A" and d.shape == "Disc" and d.r2 == pytest.approx(math.sqrt(2))
    d = coherent_domain(spec("Usual"))
    assert d.shape == "Disc" and math.isinf(d.r2)


def test_domain_ring_inv_radius():
    # |z| below a^-1/2, that is |z|^2 below 1/a
    d = coherent_domain(spec("RingInv", a=4.0, q=0.5))
    assert (d.operator, d.shape, d.r1, d.r2) == ("A", "Annulus", 0.0, 0.5)


def test_domain_adagger_cases():
    d = coherent_domain(PsiSpec.custom(lambda x: 4 + 0.5**x))
    assert (d.operator, d.r1, d.r2) == ("ADagger", 2.0, math.inf)
    d = coherent_domain(PsiSpec.custom(lambda x: 1 - x))
    assert d.operator == "ADagger" and d.shape == "Disc"


def test_domain_undecided():
    with pytest.raises(UndecidedError):
        coherent_domain(spec("PowerQ", lam=1.5, q=1.0))


@pytest.mark.parametrize("s", WITH_A[6:], ids=lambda s: s.family)
@pytest.mark.parametrize("mu", [0.25, -0.7])
def test_domain_invariant_under_shift(s, mu):
    shifted = PsiSpec(s.family, s.p, mu=mu)
    assert coherent_domain(shifted) == coherent_domain(s)


def test_vector_examples():
    v = coherent_vector(spec("Usual"), 1.0, (0, 40))
    assert v.norm2 == pytest.approx(math.e, rel=1e-14) and v.converged
    v = coherent_vector(spec("SymBracket", q=2.0), 1.0)
    assert v.coefficient(2) == pytest.approx(1 / math.sqrt(2.5), rel=1e-14)
    v = coherent_vector(spec("QOsc", q=0.5, sigma=1.0), 0.0)
    assert v.norm2 == 1 and v.coefficient(0) == 1 and np.count_nonzero(v.coefficients) == 1


def test_vector_outside_domain():
    with pytest.raises(DomainError):
        coherent_vector(spec("RingPlus", a=4.0, q=2.0), 1.0)
    with pytest.raises(DomainError):
        coherent_vector(spec("RingInv", a=4.0, q=0.5), 0.5)
    with pytest.raises(DomainError):
        coherent_vector(su_q2(2.0, 1), 0.1)


def test_short_truncation_is_not_converged():
    v = coherent_vector(spec("Usual"), 3.0, (0, 5))
    assert not v.converged


@pytest.mark.parametrize("s", WITH_A, ids=lambda s: s.family)
def test_coefficient_recursion(s):
    z = 0.8 * cmath.exp(0.3j) if s.family != "RingPlus" else 2.7 * cmath.exp(0.3j)
    if s.family == "RingInv":
        z = 0.3
    v = coherent_vector(s, z)
    rep = build_truncated(s, v.n_min, v.n_max)
    c = v.coefficients
    for i in range(len(c) - 1):
        n = v.n_min + i
        lhs, rhs = z * c[i], rep.raising_coefficient(n) * c[i + 1]
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1e-300)


def test_residual_examples():
    for s, z in ((spec("Usual"), 0.5), (spec("SymBracket", q=2.0), 0.3)):
        rep = build_truncated(s, 0, 40)
        assert eigen_residual(rep, coherent_vector(s, z, (0, 40))) < 1e-12
    s = spec("QOsc", q=0.5, sigma=1.0)
    assert eigen_residual(build_truncated(s), coherent_vector(s, 0.0, (0, 32))) == 0.0


def _sample_radius(s):
    d = coherent_domain(s)
    return (d.r1 + min(d.r2, d.r1 + 2)) / 2


@settings(max_examples=40, deadline=None)
@given(idx=st.integers(0, len(WITH_A) - 1), phase=st.floats(0, 2 * math.pi))
def test_residual_at_sampled_phases(idx, phase):
    s = WITH_A[idx]
    z = _sample_radius(s) * cmath.exp(1j * phase)
    assert eigen_residual(build_truncated(s), coherent_vector(s, z)) < 1e-10


@pytest.mark.parametrize("r", [0.1, 1.0, 10.0])
def test_power_q_norm_finite(r):
    v = coherent_vector(spec("PowerQ", lam=1.5, q=0.5), r)
    assert v.converged and math.isfinite(v.norm2) and v.norm2 > 1
    assert v.n_min < 0 < v.n_max


@pytest.mark.parametrize(
    "s, z",
    [(PsiSpec.custom(lambda x: 4 + 0.5**x), 3.0), (PsiSpec.custom(lambda x: 1 - x), 1.5)],
    ids=["annulus", "half-down"],
)
def test_adagger_eigenvector(s, z):
    v = coherent_vector(s, z)
    assert v.operator == "ADagger" and v.converged
    rep = build_truncated(s, v.n_min, v.n_max)
    r = rep.adag @ v.coefficients - z * v.coefficients
    if rep.n_min != rep.info.nu_minus:
        r = r[1:]
    assert np.linalg.norm(r) / np.linalg.norm(v.coefficients) < 1e-10
    assert eigen_residual(rep, v) < 1e-10


def test_window_covers_default_range():
    s = spec("PowerQ", lam=1.5, q=0.5)
    w = series_window(s, "A", 4.0)
    assert w.converged and w.lo <= -16 and w.hi >= 16 and w.tail < 1e-12
