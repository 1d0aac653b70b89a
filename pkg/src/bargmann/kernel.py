"""Reproducing kernel and Bargmann-space functions.

A state ``sum f_n |n>`` is realised as ``f(z) = sum f_n e_n(z)`` where
``e_n(z)`` is the ``n``-th coherent-state coefficient.  The kernel is
``G(x) = sum_n e_n(1)^2 x^n``, i.e. ``sum x^n / value(n)`` when ``a`` has
eigenvectors and ``sum x^-n value(n)`` when ``a^dagger`` does, so that
``G(zeta conj(z)) = <z|zeta>``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .coherent import CoherentDomain, _coefficients, coherent_domain, series_window
from .errors import ConvergenceError, DomainError
from .psi import PsiSpec, classify
from .representation import _lattice_psi, factorial_table
from .weight import WeightObject, closed_form_weight, integrate_against

__all__ = [
    "KernelSeries",
    "KernelValue",
    "BargmannFunction",
    "kernel_series",
    "kernel_eval",
    "kernel_functional_check",
    "state_to_function",
    "schwarz_check",
    "SchwarzReport",
    "reproduce_via_weight",
]

ANGULAR_POINTS = 128


def _kernel_domain(spec: PsiSpec, x: complex) -> CoherentDomain:
    dom = coherent_domain(spec)
    if dom.operator == "None":
        raise DomainError(f"no coherent states, hence no kernel: {dom.reason}")
    r = math.sqrt(abs(x))
    if not dom.contains(r):
        lo = 0.0 if dom.shape == "Disc" else dom.r1**2
        raise DomainError(f"|x|={abs(x):g} outside the kernel's convergence region ({lo:g}, {dom.r2**2:g})")
    return dom


@dataclass(frozen=True)
class KernelSeries:
    """Log coefficients of ``G`` on ``n_min..n_max``: term ``n`` is
    ``exp(log_coeffs[n - n_min]) * x^(sign * n)`` with ``sign = +1`` for
    ``a`` and ``-1`` for ``a^dagger``."""

    spec: PsiSpec
    operator: str
    n_min: int
    n_max: int
    log_coeffs: np.ndarray

    @property
    def ns(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def sign(self) -> int:
        return 1 if self.operator == "A" else -1

    def coefficients(self) -> np.ndarray:
        return np.exp(self.log_coeffs)

    def __call__(self, x):
        """Vectorised evaluation with polar accumulation."""
        xa = np.atleast_1d(np.asarray(x, dtype=complex))
        out = np.empty(xa.shape, dtype=complex)
        k = self.sign * self.ns
        for i, xv in enumerate(xa):
            if xv == 0:
                out[i] = np.exp(self.log_coeffs[k == 0][0]) if np.any(k == 0) else 0.0
                continue
            logm = self.log_coeffs + k * math.log(abs(xv))
            m = logm.max()
            out[i] = np.exp(m) * np.sum(np.exp(logm - m) * np.exp(1j * k * cmath.phase(xv)))
        return out if np.ndim(x) else out[0]


def kernel_series(spec: PsiSpec, n_min: int, n_max: int, operator: str | None = None) -> KernelSeries:
    op = operator or coherent_domain(spec).operator
    lv = factorial_table(spec, n_min, n_max)
    return KernelSeries(spec, op, n_min, n_max, -lv if op == "A" else lv)


@dataclass(frozen=True)
class KernelValue:
    value: complex
    tail_bound: float  # relative to |value|
    n_min: int
    n_max: int

    @property
    def real(self) -> float:
        return self.value.real


def kernel_eval(spec: PsiSpec, x: complex, truncation: tuple[int, int] | None = None) -> KernelValue:
    """``G(x)`` summed until the ratio-test tail is below ``1e-12`` relative.

    An explicit ``truncation`` whose tail bound misses that mark raises
    :class:`ConvergenceError`; ``x`` outside the convergence annulus raises
    :class:`DomainError`.
    """
    x = complex(x)
    dom = _kernel_domain(spec, x)
    if x == 0:
        info = classify(spec)
        lo, hi = truncation or info.default_range()
        ks = kernel_series(spec, lo, hi, dom.operator)
        return KernelValue(complex(ks(0.0)), 0.0, lo, hi)
    win = series_window(spec, dom.operator, abs(x), truncation)
    if not win.converged:
        raise ConvergenceError(
            f"kernel tail bound {win.tail:.3g} on [{win.lo}, {win.hi}] misses 1e-12 at |x|={abs(x):g}"
        )
    ks = kernel_series(spec, win.lo, win.hi, dom.operator)
    return KernelValue(complex(ks(x)), win.tail, win.lo, win.hi)


def kernel_functional_check(spec: PsiSpec, xs, truncation: tuple[int, int] | None = None) -> float:
    """Max relative deviation of ``x G(x) = psi(x d/dx) G(x)`` over ``xs``.

    ``psi(x d/dx)`` acts termwise, ``x^n -> psi(n) x^n``.  For ``a^dagger``
    kernels (powers ``x^-n``) the matching identity is
    ``x G = psi(1 - x d/dx) G``.  Both sides share the top power: the
    right side runs over ``n_min..n_max`` and ``x G`` uses coefficients up
    to ``n_max - 1`` (from ``n_min - 1`` when the spectrum is unbounded
    below).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=complex))
    dom = coherent_domain(spec)
    info = classify(spec)
    worst = 0.0
    for x in xs:
        if x != 0:
            _kernel_domain(spec, x)
        if truncation is not None:
            lo, hi = truncation
        elif x == 0:
            lo, hi = info.default_range()
        else:
            win = series_window(spec, dom.operator, abs(x))
            lo, hi = win.lo, win.hi
        if dom.operator == "A":
            # sum_{m} psi(m) x^m / value(m) against x * sum_n x^n / value(n)
            rhs_series = kernel_series(spec, lo, hi, "A")
            weights = _lattice_psi(spec, info, rhs_series.ns)
            lo_l = lo - 1 if info.nu_minus is None else lo
            lhs_series = kernel_series(spec, lo_l, hi - 1, "A")
        else:
            # x^-k value(k): x * x^-k value(k) = x^-(k-1) value(k-1) psi(k)
            rhs_series = kernel_series(spec, lo, hi, "ADagger")
            weights = _lattice_psi(spec, info, rhs_series.ns + 1)
            hi_l = hi + 1 if info.nu_plus is None else hi
            lhs_series = kernel_series(spec, lo + 1, hi_l, "ADagger")
        k = rhs_series.sign * rhs_series.ns
        if x == 0:
            rhs = complex(np.sum(np.exp(rhs_series.log_coeffs[k == 0]) * weights[k == 0]))
            lhs = 0.0
        else:
            terms = np.exp(rhs_series.log_coeffs + k * np.log(abs(x))) * np.exp(1j * k * cmath.phase(x))
            rhs = complex(np.sum(weights * terms))
            lhs = complex(x * lhs_series(x))
        scale = max(abs(rhs), abs(lhs))
        worst = max(worst, abs(lhs - rhs) / scale if scale > 0 else 0.0)
    return float(worst)


# ---------------------------------------------------------------- functions


@dataclass(frozen=True)
class BargmannFunction:
    """Finite coefficient sequence ``f_n`` on the spectrum, ``n_min..``."""

    spec: PsiSpec
    n_min: int
    coefficients: np.ndarray

    @classmethod
    def from_mapping(cls, spec: PsiSpec, coeffs: Mapping[int, complex]) -> "BargmannFunction":
        if not coeffs:
            raise DomainError("empty coefficient mapping")
        lo, hi = min(coeffs), max(coeffs)
        info = classify(spec)
        if not (info.contains(lo) and info.contains(hi)):
            raise DomainError(f"coefficients on [{lo}, {hi}] leave the spectrum ({info.kind})")
        arr = np.zeros(hi - lo + 1, dtype=complex)
        for n, v in coeffs.items():
            arr[n - lo] = v
        return cls(spec, lo, arr)

    @classmethod
    def basis(cls, spec: PsiSpec, n: int) -> "BargmannFunction":
        return cls.from_mapping(spec, {n: 1.0})

    @property
    def n_max(self) -> int:
        return self.n_min + self.coefficients.size - 1

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def __call__(self, z: complex) -> complex:
        return state_to_function(self.spec, self, z)


def state_to_function(spec: PsiSpec, f, z: complex) -> complex:
    """``f(z) = sum_n f_n e_n(z)`` with ``e_n`` the coherent coefficients.

    ``f`` is a :class:`BargmannFunction`, a mapping ``n -> f_n``, or a
    :class:`~bargmann.coherent.CoherentVector` (whose image is a kernel).
    """
    if isinstance(f, Mapping):
        f = BargmannFunction.from_mapping(spec, f)
    elif not isinstance(f, BargmannFunction):
        f = BargmannFunction(spec, f.n_min, np.asarray(f.coefficients, dtype=complex))
    z = complex(z)
    dom = coherent_domain(spec)
    if not dom.contains(z):
        raise DomainError(f"z={z} is outside the coherent domain")
    if z == 0:
        return complex(f.coefficients[-f.n_min]) if f.n_min <= 0 <= f.n_max else 0j
    e = _coefficients(spec, dom.operator, z, f.n_min, f.n_max)
    return complex(np.sum(f.coefficients * e))


@dataclass(frozen=True)
class SchwarzReport:
    holds: bool
    rows: list  # (z, |f(z)|^2, ||f||^2 G(|z|^2), slack)
    witnesses: list

    def to_dict(self) -> dict:
        return {"holds": self.holds,
                "rows": [{"z": [r[0].real, r[0].imag], "lhs": r[1], "rhs": r[2], "slack": r[3]} for r in self.rows],
                "witnesses": [[w.real, w.imag] for w in self.witnesses]}


def schwarz_check(spec: PsiSpec, f, zs, rtol: float = 1e-12) -> SchwarzReport:
    """Check ``|f(z)|^2 <= ||f||^2 G(|z|^2)`` (Cauchy-Schwarz) on ``zs``."""
    if isinstance(f, Mapping):
        f = BargmannFunction.from_mapping(spec, f)
    rows, bad = [], []
    for z in np.atleast_1d(np.asarray(zs, dtype=complex)):
        lhs = abs(state_to_function(spec, f, z)) ** 2
        rhs = f.norm2 * kernel_eval(spec, abs(z) ** 2).real
        slack = rhs - lhs
        rows.append((complex(z), lhs, rhs, slack))
        if lhs > rhs * (1 + rtol):
            bad.append(complex(z))
    return SchwarzReport(not bad, rows, bad)


def reproduce_via_weight(
    spec: PsiSpec, f, zeta: complex, weight: WeightObject | None = None,
    angular_points: int = ANGULAR_POINTS,
) -> complex:
    """``int dF(x) (1/2pi) int dtheta G(zeta conj(z)) f(z)``, ``z = sqrt(x) e^(i theta)``.

    Equals ``f(zeta)`` when ``F`` is a resolution of unity.  The angular
    integral is the trapezoid rule (exact for trigonometric polynomials of
    degree below ``angular_points``), the radial one uses the weight.
    """
    if isinstance(f, Mapping):
        f = BargmannFunction.from_mapping(spec, f)
    w = weight if weight is not None else closed_form_weight(spec)
    zeta = complex(zeta)
    dom = coherent_domain(spec)
    thetas = 2.0 * math.pi * np.arange(angular_points) / angular_points
    phases = np.exp(1j * thetas)
    cache: dict[int, KernelSeries] = {}

    def series_for(x_abs: float) -> KernelSeries:
        # one truncation per decade of |zeta z| keeps the work bounded
        key = math.floor(math.log10(x_abs)) if x_abs > 0 else -300
        if key not in cache:
            win = series_window(spec, dom.operator, (10.0**key, 10.0 ** (key + 1)))
            cache[key] = kernel_series(spec, win.lo, win.hi, dom.operator)
        return cache[key]

    def angular(x: float) -> complex:
        r = math.sqrt(x)
        zs = r * phases
        fz = _coefficients_matrix(spec, dom.operator, zs, f)
        args = zeta * np.conj(zs)
        ks = series_for(abs(zeta) * r)
        return complex(np.mean(ks(args) * fz))

    return integrate_against(w, angular)


def _coefficients_matrix(spec, operator, zs, f: BargmannFunction) -> np.ndarray:
    return np.array([np.sum(f.coefficients * _coefficients(spec, operator, z, f.n_min, f.n_max)) for z in zs])
