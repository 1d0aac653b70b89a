"""Coherent states: existence domain and coefficient series.

Eigenvectors of ``a`` have coefficients ``c_n = z^n value(n)^(-1/2)`` and
eigenvectors of ``a^dagger`` have ``c_n = z^-n value(n)^(1/2)``, where
``value`` is the two-sided psi-factorial.  In both cases ``|c_n|^2`` is the
``n``-th term of the kernel series at ``x = |z|^2``, so the same truncation
engine serves this module and :mod:`bargmann.kernel`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, UndecidedError
from .psi import PsiSpec, classify, log_psi_eval, psi_limits
from .representation import TruncatedRep, factorial_table, matrix_range

__all__ = [
    "CoherentDomain",
    "CoherentVector",
    "coherent_domain",
    "coherent_vector",
    "eigen_residual",
]

BOUNDARY_MARGIN = 1e-9
RATIO_CAP = 0.9
TAIL_TOL = 1e-12
MAX_TERMS = 1 << 15


@dataclass(frozen=True)
class CoherentDomain:
    """Which ladder operator has eigenvectors, and for which ``|z|``.

    ``operator`` is ``"A"``, ``"ADagger"`` or ``"None"``; ``shape`` is
    ``"Annulus"``, ``"Disc"``, ``"PuncturedPlane"`` or ``"Empty"``.  For a
    disc only ``r2`` matters and ``r1`` is 0.
    """

    operator: str
    r1: float
    r2: float
    shape: str
    reason: str = ""

    def contains(self, z: complex, margin: float = BOUNDARY_MARGIN) -> bool:
        """True when ``z`` is strictly inside, at least ``margin`` from a finite edge."""
        if self.operator == "None":
            return False
        r = abs(z)
        if self.shape == "Disc":
            return r < self.r2 - margin
        return self.r1 + margin < r and (math.isinf(self.r2) or r < self.r2 - margin)

    def to_dict(self) -> dict:
        return {"operator": self.operator, "r1": self.r1, "r2": self.r2, "shape": self.shape,
                "reason": self.reason}


def _radius(limit: float | None, which: str) -> float:
    if limit is None:
        raise UndecidedError(f"psi has no limit at {which}; radii undefined")
    return math.sqrt(limit) if limit > 0 else 0.0


def coherent_domain(spec: PsiSpec) -> CoherentDomain:
    """Existence domain of coherent states for the representation of ``spec``.

    ``r1 = sqrt(psi(-inf))`` and ``r2 = sqrt(psi(+inf))``.  Finite
    representations have none; the full lattice needs ``r1 != r2``.
    """
    info = classify(spec)
    if info.kind == "Finite":
        return CoherentDomain("None", 0.0, 0.0, "Empty", "finite representation")
    lim = psi_limits(spec)
    if info.kind == "HalfUp":
        r2 = _radius(lim.upper, "+inf")
        if r2 == 0:
            return CoherentDomain("None", 0.0, 0.0, "Empty", "psi(+inf) = 0")
        return CoherentDomain("A", 0.0, r2, "Disc")
    if info.kind == "HalfDown":
        r1 = _radius(lim.lower, "-inf")
        if r1 == 0:
            return CoherentDomain("None", 0.0, 0.0, "Empty", "psi(-inf) = 0")
        return CoherentDomain("ADagger", 0.0, r1, "Disc")
    r1, r2 = _radius(lim.lower, "-inf"), _radius(lim.upper, "+inf")
    if r1 == r2:
        raise UndecidedError(f"r1 = r2 = {r1:g}: neither ladder operator is singled out")
    if r1 < r2:
        shape = "PuncturedPlane" if r1 == 0 and math.isinf(r2) else "Annulus"
        return CoherentDomain("A", r1, r2, shape)
    return CoherentDomain("ADagger", r2, r1, "Annulus")


# ---------------------------------------------------------------- series engine


def _log_terms(spec: PsiSpec, operator: str, log_x: float, lo: int, hi: int) -> np.ndarray:
    """``log |x^n / value(n)|`` (``a``) or ``log |x^-n value(n)|`` (``a^dagger``)."""
    ns = np.arange(lo, hi + 1, dtype=float)
    lv = factorial_table(spec, lo, hi)
    if operator == "A":
        return ns * log_x - lv
    return -ns * log_x + lv


def _edge_ratio(spec: PsiSpec, operator: str, x_abs: float, n: int, side: int) -> float:
    """``t_{n+side} / t_n`` for the kernel terms at ``|x|``."""
    # in logs, so psi may exceed the float range
    lx = math.log(x_abs)
    if side > 0:
        lp = log_psi_eval(spec, float(n + 1))
        lr = lx - lp if operator == "A" else lp - lx
    else:
        lp = log_psi_eval(spec, float(n))
        lr = lp - lx if operator == "A" else lx - lp
    return math.exp(min(lr, 700.0))


@dataclass(frozen=True)
class SeriesWindow:
    """Truncation ``[lo, hi]`` with a tail bound relative to the partial sum."""

    lo: int
    hi: int
    tail: float
    converged: bool


def _tail(spec, info, operator, x_abs, lo, hi, logt) -> tuple[float, float, float]:
    # returns (relative tail bound, ratio at top, ratio at bottom)
    m = logt.max()
    total = float(np.sum(np.exp(logt - m)))
    bound = 0.0
    r_top = r_bot = 0.0
    if info.nu_plus is None or hi < info.nu_plus:
        r_top = _edge_ratio(spec, operator, x_abs, hi, 1)
        bound += math.exp(logt[-1] - m) * r_top / (1 - r_top) if r_top < 1 else math.inf
    if info.nu_minus is None or lo > info.nu_minus:
        r_bot = _edge_ratio(spec, operator, x_abs, lo, -1)
        bound += math.exp(logt[0] - m) * r_bot / (1 - r_bot) if r_bot < 1 else math.inf
    return bound / total, r_top, r_bot


def series_window(
    spec: PsiSpec,
    operator: str,
    x_abs: float | tuple[float, float],
    truncation: tuple[int, int] | None = None,
    tol: float = TAIL_TOL,
) -> SeriesWindow:
    """Pick a truncation for the kernel terms at ``|x|``.

    ``x_abs`` may be a pair ``(smallest, largest)`` so one window serves a
    batch: the top edge is checked at the largest value and the bottom edge
    at the smallest (for ``a``; reversed for ``a^dagger``).  With an explicit
    ``truncation`` the bound is reported as is.  Otherwise open edges are
    widened until every edge ratio is below 0.9 and the tail bound is below
    ``tol``.
    """
    info = classify(spec)
    x_small, x_big = (x_abs, x_abs) if np.isscalar(x_abs) else x_abs
    top_x, bot_x = (x_big, x_small) if operator == "A" else (x_small, x_big)

    def check(lo, hi):
        t1, r_top, _ = _tail(spec, info, operator, top_x, lo, hi, _log_terms(spec, operator, math.log(top_x), lo, hi))
        t2, _, r_bot = _tail(spec, info, operator, bot_x, lo, hi, _log_terms(spec, operator, math.log(bot_x), lo, hi))
        return max(t1, t2), r_top, r_bot

    if truncation is not None:
        lo, hi = truncation
        if not (info.contains(lo) and info.contains(hi)) or hi < lo:
            raise DomainError(f"truncation {truncation} leaves the spectrum ({info.kind})")
        tail, r_top, r_bot = check(lo, hi)
        ok = tail < tol and r_top < RATIO_CAP and r_bot < RATIO_CAP
        return SeriesWindow(lo, hi, tail, ok)
    lo, hi = matrix_range(spec, info)
    while True:
        tail, r_top, r_bot = check(lo, hi)
        grow_top = r_top >= RATIO_CAP or (r_top > 0 and tail >= tol)
        grow_bot = r_bot >= RATIO_CAP or (r_bot > 0 and tail >= tol)
        if not (grow_top or grow_bot):
            return SeriesWindow(lo, hi, tail, True)
        width = hi - lo + 1
        if width > MAX_TERMS:
            return SeriesWindow(lo, hi, tail, False)
        if grow_top:
            hi = hi + width if info.nu_plus is None else min(hi + width, info.nu_plus)
        if grow_bot:
            lo = lo - width if info.nu_minus is None else max(lo - width, info.nu_minus)


# ---------------------------------------------------------------- vectors


@dataclass(frozen=True)
class CoherentVector:
    """Coefficients of ``|z>`` on ``n_min..n_max`` with a tail certificate."""

    spec: PsiSpec
    z: complex
    operator: str
    n_min: int
    n_max: int
    coefficients: np.ndarray
    norm2: float
    tail_bound: float
    converged: bool

    @property
    def ns(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def coefficient(self, n: int) -> complex:
        return complex(self.coefficients[n - self.n_min])


def _coefficients(spec: PsiSpec, operator: str, z: complex, lo: int, hi: int) -> np.ndarray:
    ns = np.arange(lo, hi + 1)
    if z == 0:
        # only z^0 survives; negative powers were excluded by the caller
        out = np.zeros(ns.size, dtype=complex)
        out[ns == 0] = 1.0
        return out
    lv = factorial_table(spec, lo, hi)
    log_r, phase = math.log(abs(z)), cmath.phase(z)
    sign = 1.0 if operator == "A" else -1.0
    mag = np.exp(sign * (ns * log_r - 0.5 * lv))
    return mag * np.exp(1j * sign * ns * phase)


def coherent_vector(
    spec: PsiSpec, z: complex, truncation: tuple[int, int] | None = None
) -> CoherentVector:
    """Eigenvector of ``a`` (or ``a^dagger``) with eigenvalue ``z``, ``c_0 = 1``.

    Without ``truncation`` the range grows until the tail certificate holds.
    An explicit truncation that is too short returns ``converged=False``.
    """
    dom = coherent_domain(spec)
    z = complex(z)
    if not dom.contains(z):
        raise DomainError(f"z={z} is not inside the coherent domain {dom.shape}({dom.r1:g}, {dom.r2:g})")
    info = classify(spec)
    if z == 0:
        if (dom.operator == "A" and info.nu_minus != 0) or (dom.operator == "ADagger" and info.nu_plus != 0):
            raise DomainError("z = 0 is a pole of the coefficients for this spectrum")
        lo, hi = truncation if truncation is not None else info.default_range()
        c = _coefficients(spec, dom.operator, z, lo, hi)
        return CoherentVector(spec, z, dom.operator, lo, hi, c, 1.0, 0.0, True)
    win = series_window(spec, dom.operator, abs(z) ** 2, truncation)
    c = _coefficients(spec, dom.operator, z, win.lo, win.hi)
    norm2 = float(np.sum(np.abs(c) ** 2))
    return CoherentVector(spec, z, dom.operator, win.lo, win.hi, c, norm2, win.tail * norm2, win.converged)


def eigen_residual(rep: TruncatedRep, v: CoherentVector) -> float:
    """``||(a - z) v|| / ||v||`` on the truncation of ``rep`` (``a^dagger`` for
    the other case).

    The row whose image needs a coefficient from outside the truncation is
    dropped unless that edge is a weight state.
    """
    if v.n_min > rep.n_min or v.n_max < rep.n_max:
        raise DomainError("the coherent vector does not cover the matrix truncation")
    c = v.coefficients[rep.n_min - v.n_min : rep.n_max - v.n_min + 1]
    op = rep.a if v.operator == "A" else rep.adag
    r = op @ c - v.z * c
    if v.operator == "A":
        if rep.n_max != rep.info.nu_plus:
            r = r[:-1]
    elif rep.n_min != rep.info.nu_minus:
        r = r[1:]
    norm = np.linalg.norm(c)
    if norm == 0:
        raise ConvergenceError("zero vector")
    return float(np.linalg.norm(r) / norm)

