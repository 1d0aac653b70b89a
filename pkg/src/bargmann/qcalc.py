"""q-numbers, q-exponentials and q-integrals.

Two conventions are supported:

``"symmetric"``
    ``[x] = (q^x - q^-x) / (q - 1/q)``, derivative
    ``D f(x) = (f(qx) - f(x/q)) / (x (q - 1/q))``; invariant under ``q -> 1/q``.
``"jackson"``
    ``(x) = (q^x - 1) / (q - 1)``, derivative
    ``D f(x) = (f(qx) - f(x)) / (x (q - 1))``, used with ``q > 1``.

Each ``Exp_q`` solves ``D Exp_q = Exp_q`` with ``Exp_q(0) = 1``.  The
q-integrals are the geometric sums inverting the matching derivative.
"""

from __future__ import annotations

import math
from typing import Callable

import mpmath
import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, ParameterError
from .reports import MomentReport, MomentRow, rel_error

__all__ = [
    "q_number",
    "q_factorial",
    "q_exp",
    "q_exp_product",
    "first_negative_zero",
    "q_integral",
    "q_derivative",
    "q_resolution_check",
]

VARIANTS = ("symmetric", "jackson")
MAX_TERMS = 100_000
TERM_TOL = 1e-18


def _check(variant: str, q: float) -> None:
    if variant not in VARIANTS:
        raise ParameterError(f"unknown q-variant {variant!r}")
    if not q > 0 or q == 1.0:
        raise ParameterError(f"q must be positive and != 1, got {q}")


def q_number(x, q: float, variant: str = "symmetric"):
    """``[x]`` or ``(x)``; works elementwise on arrays."""
    _check(variant, q)
    xa = np.asarray(x, dtype=float)
    if variant == "symmetric":
        out = (q**xa - q ** (-xa)) / (q - 1.0 / q)
    else:
        out = (q**xa - 1.0) / (q - 1.0)
    return float(out) if out.ndim == 0 else out


def q_factorial(n: int, q: float, variant: str = "symmetric") -> float:
    """``[1][2]...[n]`` (or the Jackson analogue); 1 for ``n = 0``."""
    if n < 0:
        raise ParameterError("q-factorial needs n >= 0")
    return float(np.prod(q_number(np.arange(1, n + 1), q, variant))) if n else 1.0


def _series_terms(variant, q, x):
    # yields (n, term) for sum x^n / qfact(n)
    t = 1.0
    yield 0, t
    for n in range(1, MAX_TERMS):
        if variant == "symmetric":
            num = (q**n - q ** (-n)) / (q - 1.0 / q)
        else:
            num = (q**n - 1.0) / (q - 1.0)
        t = t * x / num
        yield n, t


def q_exp(variant: str, q: float, x: float, tol: float = 1e-15) -> float:
    """Series ``sum_n x^n / qfact(n)`` summed until the tail is below ``tol``.

    When cancellation between terms would swamp the double-precision result
    (large negative ``x``) the sum is redone with mpmath at a working
    precision matched to the size of the largest term.
    """
    _check(variant, q)
    x = float(x)
    if x == 0.0:
        return 1.0
    total = 0.0
    biggest = 0.0
    prev = math.inf
    for n, t in _series_terms(variant, q, x):
        total += t
        biggest = max(biggest, abs(t))
        # terms decrease geometrically once |x| < qnum(n+1); stop on the decreasing tail
        if n > 0 and abs(t) < prev and abs(t) <= tol * abs(total) * 1e-3:
            break
        if abs(t) == 0.0:
            break
        prev = abs(t)
    else:
        raise ConvergenceError(f"q_exp did not converge in {MAX_TERMS} terms at x={x}")
    if biggest * 1e-16 > tol * max(abs(total), 1e-300):
        return _q_exp_mp(variant, q, x, biggest, tol)
    return float(total)


def _q_exp_mp(variant, q, x, biggest, tol):
    digits = int(math.log10(max(biggest, 1.0))) + int(-math.log10(tol)) + 10
    with mpmath.workdps(digits):
        qq, xx = mpmath.mpf(q), mpmath.mpf(x)
        total, t = mpmath.mpf(1), mpmath.mpf(1)
        for n in range(1, MAX_TERMS):
            if variant == "symmetric":
                num = (qq**n - qq ** (-n)) / (qq - 1 / qq)
            else:
                num = (qq**n - 1) / (qq - 1)
            t = t * xx / num
            total += t
            if abs(t) < mpmath.mpf(10) ** (-digits) * max(abs(total), mpmath.mpf(10) ** (-digits)):
                break
        return float(total)


def q_exp_product(q: float, x: float, tol: float = 1e-17) -> float:
    """Jackson ``Exp_q(x) = prod_{p>=0} (1 + x (1 - 1/q) q^-p)`` for ``q > 1``."""
    if not q > 1:
        raise ParameterError("the product form needs q > 1")
    c = x * (1.0 - 1.0 / q)
    prod = 1.0
    for p in range(MAX_TERMS):
        f = c * q ** (-p)
        prod *= 1.0 + f
        if prod == 0.0 or abs(f) / (1.0 - 1.0 / q) < tol:
            return prod
    raise ConvergenceError("product did not converge")


def first_negative_zero(variant: str, q: float, horizon: float = 1e3) -> float:
    """``zeta > 0`` such that ``-zeta`` is the first zero of ``Exp_q`` left of 0.

    Jackson: closed form ``1 / (1 - 1/q)``.  Symmetric: bracket outward from
    the Jackson value for ``max(q, 1/q)`` and refine with Brent's method.
    """
    _check(variant, q)
    if variant == "jackson":
        if not q > 1:
            raise ParameterError("Jackson Exp_q is used with q > 1")
        return 1.0 / (1.0 - 1.0 / q)
    Q = max(q, 1.0 / q)
    f = lambda x: q_exp("symmetric", Q, -x)  # noqa: E731
    lo = 0.0
    hi = 1.0 / (1.0 - 1.0 / Q)
    while f(hi) > 0:
        lo, hi = hi, hi * 1.25
        if hi > horizon:
            raise ConvergenceError(f"no sign change of Exp_q(-x) up to x={horizon}")
    # refine the left end so the bracket holds exactly one sign change
    xs = np.linspace(lo, hi, 33)
    vals = [f(x) for x in xs]
    i = next(k for k, v in enumerate(vals) if v <= 0)
    if vals[i] == 0:
        return float(xs[i])
    return float(brentq(f, xs[i - 1], xs[i], xtol=1e-12, rtol=1e-15))


def q_integral(
    variant: str,
    q: float,
    f: Callable[[float], float],
    upper: float,
    tol: float = TERM_TOL,
) -> float:
    """q-integral of ``f`` from 0 to ``upper``.

    Jackson (``q > 1``): ``(q-1) sum_{n>=0} q^-(n+1) upper f(q^-(n+1) upper)``.
    Symmetric: with ``p = min(q, 1/q)``,
    ``(1/p - p) sum_{k>=0} p^(2k+1) upper f(p^(2k+1) upper)``.
    Terms below ``tol`` times the partial sum are dropped once the sequence
    decreases.
    """
    _check(variant, q)
    if variant == "jackson":
        if not q > 1:
            raise ParameterError("Jackson q-integral is used with q > 1")
        weight, ratio = q - 1.0, 1.0 / q
        nodes = lambda k: ratio ** (k + 1)  # noqa: E731
    else:
        p = min(q, 1.0 / q)
        weight, ratio = 1.0 / p - p, p * p
        nodes = lambda k: p ** (2 * k + 1)  # noqa: E731
    total = 0.0
    prev = math.inf
    for k in range(MAX_TERMS):
        x = nodes(k) * upper
        term = weight * x * f(x)
        total += term
        if abs(term) <= tol * abs(total) and abs(term) <= prev:
            return total
        if k > 200 and abs(term) > prev:
            raise ConvergenceError("q-integral terms are not decreasing")
        prev = abs(term)
    raise ConvergenceError(f"q-integral did not converge in {MAX_TERMS} terms")


def q_derivative(variant: str, q: float, f: Callable[[float], float], x: float) -> float:
    """Divided difference matching the variant (see module docstring)."""
    _check(variant, q)
    if variant == "jackson":
        return (f(q * x) - f(x)) / (x * (q - 1.0))
    return (f(q * x) - f(x / q)) / (x * (q - 1.0 / q))


def q_resolution_check(
    variant: str, q: float, n_range: tuple[int, int] = (0, 8), tol: float = 1e-9
) -> MomentReport:
    """Moments of ``Exp_q(-x)`` under the q-integral over ``[0, zeta]``.

    Computes ``int_0^zeta d_q x Exp_q(-x) x^n`` and compares it with
    ``qfact(n)`` for each ``n`` in ``n_range``.
    """
    zeta = first_negative_zero(variant, q)
    report = MomentReport(method="q-integral", tol=tol, notes={"zeta": zeta, "variant": variant, "q": q})
    for n in range(n_range[0], n_range[1] + 1):
        val = q_integral(variant, q, lambda x: q_exp(variant, q, -x) * x**n, zeta)
        target = q_factorial(n, q, variant)
        report.rows.append(MomentRow(n, target, val, rel_error(val, target)))
    return report
