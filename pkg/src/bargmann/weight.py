"""Weight functions and measures for the Bargmann scalar product.

A weight ``F`` on ``x = |z|^2`` gives a resolution of unity exactly when its
Mellin moments obey ``F^(n+1) = psi(n) F^(n)`` with ``F^(1) = 1``.  This
module builds the known weights (continuous densities and atomic measures),
computes their moments, scans them for positivity, and detects families for
which no Mellin inverse exists.

Densities are integrated in ``u = ln x``, where every weight in the
catalogue decays at least like a Gaussian or an exponential.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable

import numpy as np
from scipy import integrate, special

from . import qcalc
from .errors import ConvergenceError, NoClosedFormError, ParameterError, UnsupportedError
from .psi import PsiSpec, _exp_poly_coeffs, classify
from .reports import MomentReport, MomentRow, rel_error
from .representation import psi_factorial

__all__ = [
    "WeightObject",
    "moment_targets",
    "closed_form_weight",
    "mellin_moment",
    "verify_moments",
    "PositivityVerdict",
    "positivity_scan",
    "MellinSolution",
    "bernoulli_polynomial",
    "bernoulli_solution",
    "GrowthVerdict",
    "mellin_growth_test",
    "periodic_multiplier_family",
    "ff_equation_residual",
    "naive_q_exp_candidate",
    "integrate_against",
    "powerq_moment_sign",
]

QUAD_EPSREL = 1e-12
QUAD_LIMIT = 200
INNER_EPSREL = 1e-11
ATOM_TERM_TOL = 1e-18
MAX_ATOMS = 10_000


@dataclass(frozen=True)
class WeightObject:
    """A weight on ``x = |z|^2``.

    ``kind`` is ``"Density"``, ``"AtomicMeasure"``, ``"NonExistent"`` or
    ``"Inconclusive"``.  Densities carry ``log_evaluator`` (log of the
    unnormalised density, on ``x``) or ``evaluator`` when the density may
    change sign, plus an optional closed-form ``log_mellin``.  Atomic
    measures carry ``atom(n) -> (location, log_mass)`` with masses taken
    against ``dx``, so ``F^(rho) = sum mass * location**(rho - 1)``.
    ``normalization`` multiplies the raw object so that ``F^(1) = 1``.
    """

    kind: str
    label: str = ""
    spec: PsiSpec | None = None
    support: tuple[float, float] = (0.0, math.inf)
    scale: float = 1.0
    evaluator: Callable | None = None
    log_evaluator: Callable | None = None
    log_mellin: Callable | None = None
    atom: Callable | None = None
    normalization: float = 1.0
    claims_positive: bool = True
    reason: str = ""
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        """Normalised density values."""
        if self.kind != "Density":
            raise UnsupportedError(f"{self.kind} weight has no pointwise values")
        x = np.asarray(x, dtype=float)
        if self.log_evaluator is not None:
            with np.errstate(divide="ignore", over="ignore"):
                out = self.normalization * np.exp(self.log_evaluator(x))
        elif self.evaluator is not None:
            out = self.normalization * np.asarray(self.evaluator(x), dtype=float)
        else:
            raise UnsupportedError(f"{self.label}: moment-only weight, no pointwise density")
        lo, hi = self.support
        out = np.where((x > lo) & (x < hi), out, 0.0)
        return float(out) if out.ndim == 0 else out

    def atoms(self, count: int) -> list[tuple[float, float]]:
        """First ``count`` atoms as ``(location, normalised mass)``."""
        if self.kind != "AtomicMeasure":
            raise UnsupportedError("not an atomic measure")
        out = []
        for n in range(count):
            loc, lm = self.atom(n)
            out.append((loc, self.normalization * math.exp(lm)))
        return out

    @property
    def exists(self) -> bool:
        return self.kind in ("Density", "AtomicMeasure")


# ---------------------------------------------------------------- targets


def moment_targets(spec: PsiSpec, n_range: tuple[int, int]) -> dict[int, float]:
    """``n -> F^(n+1)`` required by the resolution of unity (``value(n)``)."""
    return {n: psi_factorial(spec, n) for n in range(n_range[0], n_range[1] + 1)}


# ---------------------------------------------------------------- quadrature


def _log_integral(
    g: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, n_grid: int = 801, epsrel: float = QUAD_EPSREL
):
    """``log int_lo^hi exp(g(u)) du`` for a unimodal log integrand.

    The integrand is scaled by its sampled maximum, the range is clipped to
    where it exceeds ``e^-60`` of that maximum, and the remainder goes to
    adaptive Gauss-Kronrod (QUADPACK).  A peak narrower than the grid is
    located by zooming into the bracket around the best sample.  Returns
    ``(log value, rel error, converged)``.
    """
    for _ in range(12):
        us = np.linspace(lo, hi, n_grid)
        with np.errstate(all="ignore"):
            gs = np.asarray(g(us), dtype=float)
        gs = np.where(np.isnan(gs), -np.inf, gs)
        k = int(np.argmax(gs))
        m = gs[k]
        if not np.isfinite(m):
            return -math.inf, 0.0, m == -math.inf
        left = gs[k - 1] if k > 0 else -math.inf
        right = gs[k + 1] if k < n_grid - 1 else -math.inf
        if left > m - 40.0 or right > m - 40.0:
            break
        # everything outside the bracket is below e^-40 of the peak
        lo, hi = us[max(k - 1, 0)], us[min(k + 1, n_grid - 1)]
    # >= keeps the peak even when m - 60 rounds to m
    keep = np.flatnonzero(gs >= m - 60.0)
    a = us[max(keep[0] - 1, 0)]
    b = us[min(keep[-1] + 1, n_grid - 1)]

    def h(u):
        with np.errstate(all="ignore"):
            return math.exp(min(float(g(np.array([u]))[0]) - m, 700.0))

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                h, a, b, points=[us[k]], epsabs=0.0, epsrel=epsrel, limit=QUAD_LIMIT
            )
            ok = True
        except integrate.IntegrationWarning:
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(h, a, b, points=[us[k]], epsabs=0.0, epsrel=epsrel, limit=QUAD_LIMIT)
            ok = False
    if val <= 0:
        return -math.inf, math.inf, False
    return m + math.log(val), err / val, ok


def _u_bounds(w: WeightObject) -> tuple[float, float]:
    lo, hi = w.support
    s = math.log(w.scale)
    u_lo = math.log(lo) if lo > 0 else s - 120.0
    u_hi = math.log(hi) if math.isfinite(hi) else s + 120.0
    return u_lo, u_hi


def _log_density_u(w: WeightObject) -> Callable[[np.ndarray], np.ndarray]:
    if w.log_evaluator is not None:
        return lambda u: w.log_evaluator(np.exp(u))
    ev = w.evaluator
    return lambda u: np.log(np.asarray(ev(np.exp(u)), dtype=float))


def _atom_log_moment(w: WeightObject, rho: float) -> tuple[float, float, bool]:
    # sum of mass_n * x_n^(rho-1), in log space, until the terms have peaked
    # and fallen below ATOM_TERM_TOL of the running sum
    logs = []
    peak = -math.inf
    for n in range(MAX_ATOMS):
        loc, lm = w.atom(n)
        lt = lm + (rho - 1.0) * math.log(loc)
        logs.append(lt)
        peak = max(peak, lt)
        if n > 2 and lt < logs[-2] and lt - peak < math.log(ATOM_TERM_TOL):
            total = peak + math.log(sum(math.exp(v - peak) for v in logs))
            ratio = math.exp(lt - logs[-2])
            remainder = math.exp(lt - total) * ratio / (1.0 - ratio) if ratio < 1 else math.inf
            return total, remainder, True
    return peak, math.inf, False


def mellin_moment(w: WeightObject, rho: float, normalized: bool = True) -> tuple[float, float, bool]:
    """``F^(rho)`` of a weight: ``(value, relative error estimate, converged)``.

    Density: quadrature in ``u = ln x``.  Atomic measure: direct sum with a
    geometric remainder bound.  Moment-only weights use their closed form.
    """
    c = w.normalization if normalized else 1.0
    if w.kind == "AtomicMeasure":
        lv, err, ok = _atom_log_moment(w, rho)
    elif w.kind == "Density":
        if w.log_evaluator is None and w.evaluator is None:
            return c * math.exp(w.log_mellin(rho)), 0.0, True
        ld = _log_density_u(w)
        lv, err, ok = _log_integral(lambda u: ld(u) + rho * u, *_u_bounds(w))
    else:
        raise UnsupportedError(f"{w.kind} weight has no moments")
    return c * math.exp(lv), err, ok


def _normalized(w: WeightObject) -> WeightObject:
    raw, _, ok = mellin_moment(w, 1.0, normalized=False)
    if not ok or not raw > 0:
        raise ConvergenceError(f"{w.label}: could not normalise (F^(1) = {raw})")
    return replace(w, normalization=1.0 / raw)


def verify_moments(
    w: WeightObject, spec: PsiSpec, n_range: tuple[int, int], tol: float = 1e-6
) -> MomentReport:
    """Compare ``F^(n+1)`` of ``w`` with ``value(n)`` for ``n`` in ``n_range``."""
    if not w.exists:
        raise UnsupportedError(f"cannot verify moments of a {w.kind} weight: {w.reason}")
    if w.kind == "AtomicMeasure":
        method = "atomic-sum"
    elif w.log_evaluator is None and w.evaluator is None:
        method = "closed-form"
    else:
        method = "quadrature"
    targets = moment_targets(spec, n_range)
    report = MomentReport(method=method, tol=tol)
    for n, target in targets.items():
        val, err, ok = mellin_moment(w, n + 1.0)
        note = "" if ok else "quadrature/sum did not converge"
        report.rows.append(MomentRow(n, target, val, rel_error(val, target), ok, note))
    return report


def powerq_moment_sign(w: WeightObject, spec: PsiSpec, n_range: tuple[int, int] = (-6, 8)) -> dict:
    """Decide between ``lam^(+n)`` and ``lam^(-n)`` in ``F^(n+1) = lam^(+-n) q^(-n(n+1)/2)``.

    Both candidates are compared with quadrature moments of the normalised
    log-normal weight; the exponent with the smaller worst error wins.
    """
    lam, q = spec.p["lam"], spec.p["q"]
    worst = {"+n": 0.0, "-n": 0.0}
    for n in range(n_range[0], n_range[1] + 1):
        val, _, _ = mellin_moment(w, n + 1.0)
        base = q ** (-n * (n + 1) / 2.0)
        worst["+n"] = max(worst["+n"], rel_error(val, lam**n * base))
        worst["-n"] = max(worst["-n"], rel_error(val, lam ** (-n) * base))
    verdict = min(worst, key=worst.get)
    return {"lambda_exponent": verdict, "max_rel_error": worst, "n_range": list(n_range)}


# ---------------------------------------------------------------- closed forms


def _lognormal(lam: float, q: float, spec: PsiSpec | None) -> WeightObject:
    ln_q = math.log(q)
    ln_lam = math.log(lam)

    def log_f(x):
        with np.errstate(divide="ignore"):
            L = np.log(x) - ln_lam
        return L * L / (2.0 * ln_q) - L / 2.0

    return WeightObject(
        "Density", label=f"log-normal F0(lam={lam:g}, q={q:g})", spec=spec, scale=lam,
        log_evaluator=log_f, params={"lam": lam, "q": q},
    )


def _sym_bracket_weight(q: float, spec: PsiSpec | None) -> WeightObject:
    Q = max(q, 1.0 / q)
    lq = math.log(Q)
    d = Q - 1.0 / Q
    m0 = -0.5 * lq - math.log(d)
    # log c_n = -sum log(1 - Q^-2i)
    n_max = 400
    log_c = -np.concatenate([[0.0], np.cumsum(np.log1p(-(Q ** (-2.0 * np.arange(1, n_max + 1)))))])
    centers = m0 - 2.0 * lq * np.arange(n_max + 1)

    def log_f(x):
        u = np.log(np.atleast_1d(np.asarray(x, dtype=float)))[:, None]
        terms = log_c[None, :] - (u - centers[None, :]) ** 2 / (2.0 * lq)
        out = special.logsumexp(terms, axis=1)
        return out if np.ndim(x) else out[0]

    # analytic normalisation, independent of the quadrature that sets it
    f1 = float(np.sum(np.exp(log_c - 2.0 * lq * np.arange(n_max + 1))))
    analytic = d / (f1 * math.sqrt(2.0 * math.pi * lq))
    return WeightObject(
        "Density", label=f"[x] weight (q={q:g})", spec=spec, scale=1.0 / d,
        log_evaluator=log_f, params={"q": q, "Q": Q, "analytic_normalization": analytic},
    )


def _jackson_weight(q: float, spec: PsiSpec | None) -> WeightObject:
    # F(x) = 1 / Exp_q(qx) = prod_p 1 / (1 + x (q-1) q^-p)
    p_max = int(math.ceil(80.0 / math.log(q))) + 1
    powers = q ** (-np.arange(p_max))

    def log_f(x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        c = xa[:, None] * (q - 1.0) * powers[None, :]
        out = -np.sum(np.log1p(c), axis=1)
        # tail beyond p_max: log1p(c) ~ c, geometric
        out -= xa * (q - 1.0) * q ** (-p_max) / (1.0 - 1.0 / q)
        return out if np.ndim(x) else out[0]

    return WeightObject(
        "Density", label=f"1/Exp_q(qx) (q={q:g})", spec=spec, scale=1.0,
        log_evaluator=log_f, params={"q": q},
    )


def _log_k2(u: float) -> float:
    """log of ``int exp(-e^s - x e^-s) ds`` at ``x = e^u`` (equals ``2 K_0(2 sqrt x)``).

    Centred at the saddle ``s = u/2``:
    ``-2 sqrt(x) + log int exp(-2 sqrt(x) (cosh t - 1)) dt``.
    """
    r = 2.0 * math.exp(0.5 * u)

    def acosh1p(y):
        return math.log1p(y + math.sqrt(y * (y + 2.0)))

    # split where the exponent reaches -1 so the flat core and the
    # double-exponential tail are integrated separately
    t0, t_max = acosh1p(1.0 / r), acosh1p(745.0 / r)
    f = lambda t: math.exp(-r * (math.cosh(t) - 1.0))  # noqa: E731
    with warnings.catch_warnings():
        # roundoff flags at very large x are harmless: the log is dominated by -r
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val = sum(
            integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=QUAD_LIMIT)[0]
            for a, b in ((0.0, t0), (t0, t_max))
        )
    return -r + math.log(2.0 * val)


def _log_k2_closed(u):
    """Vectorised ``log(2 K_0(2 sqrt(e^u)))`` through the scaled Bessel function."""
    # K_0 has a log singularity at 0; below 1e-300 it is still finite
    r = np.maximum(2.0 * np.exp(0.5 * np.asarray(u, dtype=float)), 1e-300)
    return np.log(2.0 * special.k0e(r)) - r


def _log_product_density(n: int) -> Callable[[float], float]:
    """log of ``int e^-(t1+..+tn) delta(x - t1...tn)`` as a function of ``u = ln x``.

    ``F_1(x) = e^-x``, ``F_2`` is the 1-fold integral above and
    ``F_k(e^u) = int F_{k-1}(e^(u-s)) exp(-e^s) ds`` by iterated quadrature.
    """
    if n == 1:
        return lambda u: -math.exp(u)
    if n == 2:
        return _log_k2
    # the innermost fold has the closed form 2 K_0(2 sqrt x); quadrature at
    # that level too would cost a full 1-D integral per outer sample
    inner = _log_k2_closed if n == 3 else _log_product_density(n - 1)

    def log_fk(u):
        star = u / n
        if n * math.exp(star) > 2000.0:
            # saddle-point asymptotics; F is below e^-2000 here and underflows anyway
            return -n * math.exp(star) + 0.5 * (n - 1) * math.log(2 * math.pi) - 0.5 * (n - 1) * star - 0.5 * math.log(n)
        lo = min(u, star) - 40.0
        hi = max(0.0, star) + 6.0
        g = lambda s: inner(u - np.atleast_1d(s)) - np.exp(s)  # noqa: E731
        # the log integrand carries ~r * 1e-16 cancellation noise at large x
        lv, _, _ = _log_integral(g, lo, hi, n_grid=121, epsrel=INNER_EPSREL)
        return lv

    return log_fk


def _monomial_weight(n: int, spec: PsiSpec | None) -> WeightObject:
    log_mellin = lambda rho: n * special.gammaln(rho)  # noqa: E731
    if n == 1:
        return WeightObject("Density", label="exp(-x)", spec=spec, log_evaluator=lambda x: -np.asarray(x, dtype=float),
                            log_mellin=log_mellin, params={"n": 1})
    if n in (2, 3):
        lf = _log_product_density(n)

        def log_f(x):
            xa = np.atleast_1d(np.asarray(x, dtype=float))
            out = np.array([lf(math.log(v)) if v > 0 else -np.inf for v in xa])
            return out if np.ndim(x) else out[0]

        return WeightObject("Density", label=f"Gamma(rho)^{n} inverse", spec=spec, log_evaluator=log_f,
                            log_mellin=log_mellin, params={"n": n})
    return WeightObject("Density", label=f"Gamma(rho)^{n} (moments only)", spec=spec,
                        log_mellin=log_mellin, params={"n": n})


def _ring_plus(a: float, q: float, spec: PsiSpec | None) -> WeightObject:
    # atoms at a q^n, log-delta weight a^-n / ((q-1)...(q^n-1)), dx-mass = weight * location
    @lru_cache(maxsize=None)
    def atom(n):
        lw = -n * math.log(a) - sum(math.log(q**i - 1.0) for i in range(1, n + 1))
        loc = a * q**n
        return loc, lw + math.log(loc)

    return WeightObject("AtomicMeasure", label=f"atoms at a q^n (a={a:g}, q={q:g})", spec=spec,
                        support=(a, math.inf), scale=a, atom=atom, params={"a": a, "q": q})


def _ring_inv(a: float, q: float, spec: PsiSpec | None) -> WeightObject:
    # atoms at q^n / a, log-delta weight q^(n(n-1)/2) / (a^n (q;q)_n)
    @lru_cache(maxsize=None)
    def atom(n):
        lw = 0.5 * n * (n - 1) * math.log(q) - n * math.log(a) - sum(
            math.log1p(-(q**i)) for i in range(1, n + 1)
        )
        loc = q**n / a
        return loc, lw + math.log(loc)

    return WeightObject("AtomicMeasure", label=f"atoms at q^n / a (a={a:g}, q={q:g})", spec=spec,
                        support=(0.0, 1.0 / a), scale=1.0 / a, atom=atom, params={"a": a, "q": q})


def _usual(sigma: float, spec: PsiSpec | None) -> WeightObject:
    return WeightObject(
        "Density", label=f"x^{sigma:g} exp(-x)", spec=spec,
        log_evaluator=lambda x: sigma * np.log(x) - x,
        log_mellin=lambda rho: special.gammaln(rho + sigma),
        params={"sigma": sigma},
    )


def _exp_poly(spec: PsiSpec) -> WeightObject:
    coeffs = _exp_poly_coeffs(spec.p)
    sol = bernoulli_solution(coeffs)
    verdict = mellin_growth_test(sol)
    if verdict.status == "NonExistent":
        return WeightObject("NonExistent", label="ExpPoly", spec=spec, reason=verdict.reason)
    if len(coeffs) == 2:
        # exp(a0 + a1 x) = lam q^-x
        return _lognormal(math.exp(coeffs[0]), math.exp(-coeffs[1]), spec)
    return WeightObject(
        "Inconclusive", label="ExpPoly", spec=spec,
        reason="Mellin inverse exists but its positivity is not established",
    )


def closed_form_weight(spec: PsiSpec) -> WeightObject:
    """Catalogued weight for ``spec``, normalised so that ``F^(1) = 1``.

    Raises :class:`NoClosedFormError` for families outside the catalogue.
    ``ExpPoly`` returns a ``NonExistent`` object for odd ``p`` and an
    ``Inconclusive`` one for even ``p >= 2``.
    """
    if spec.mu != 0.0:
        raise NoClosedFormError("closed forms are catalogued for mu = 0 only")
    f, p = spec.family, spec.p
    if f == "Usual":
        info = classify(spec)
        w = _usual(p["sigma"], spec) if info.kind == "HalfUp" else None
    elif f == "PowerQ":
        if p["q"] == 1.0:
            raise NoClosedFormError("PowerQ with q = 1 has r1 = r2")
        w = _lognormal(p["lam"], p["q"], spec)
    elif f == "ExpPoly":
        w = _exp_poly(spec)
        if not w.exists:
            return w
    elif f == "RingPlus":
        w = _ring_plus(p["a"], p["q"], spec)
    elif f == "RingInv":
        w = _ring_inv(p["a"], p["q"], spec)
    elif f == "SymBracket":
        w = _sym_bracket_weight(p["q"], spec)
    elif f == "QOsc" and p["sigma"] == 1.0:
        w = _sym_bracket_weight(p["q"], spec)
    elif f == "JacksonBracket":
        w = _jackson_weight(p["q"], spec)
    elif f == "Monomial":
        w = _monomial_weight(int(p["n"]), spec)
    else:
        w = None
    if w is None:
        raise NoClosedFormError(f"no catalogued weight for {f} {p}")
    if w.kind == "Density" and w.log_evaluator is None:
        return replace(w, normalization=math.exp(-w.log_mellin(1.0)))
    return _normalized(w)


def naive_q_exp_candidate(q: float) -> WeightObject:
    """``Exp_q(-x)`` (symmetric) as a candidate density for ``psi = [x]``.

    It solves the same difference equation as the true weight but changes
    sign beyond its first zero.
    """
    Q = max(q, 1.0 / q)
    ev = np.vectorize(lambda x: qcalc.q_exp("symmetric", Q, -x), otypes=[float])
    return WeightObject("Density", label=f"Exp_q(-x) (q={q:g})", scale=1.0, evaluator=ev,
                        claims_positive=False, params={"q": q})


# ---------------------------------------------------------------- positivity


@dataclass(frozen=True)
class PositivityVerdict:
    nonnegative: bool
    witness: tuple[float, float] | None
    n_points: int
    grid: tuple[float, float]

    def to_dict(self) -> dict:
        return {"nonnegative": self.nonnegative, "witness": list(self.witness) if self.witness else None,
                "n_points": self.n_points, "grid": list(self.grid)}


def positivity_scan(
    w: WeightObject, n_points: int = 4096, span: tuple[float, float] = (1e-6, 1e6), chunk: int = 256
) -> PositivityVerdict:
    """Sample a density on a log-spaced grid and return the first negative value.

    The grid spans ``span`` times the weight's scale, clipped to its support.
    Non-finite samples count as failures.
    """
    if w.kind != "Density":
        raise UnsupportedError("positivity scan applies to densities")
    if w.log_evaluator is None and w.evaluator is None:
        raise UnsupportedError(f"{w.label}: no pointwise density to scan")
    lo = max(span[0] * w.scale, w.support[0])
    hi = min(span[1] * w.scale, w.support[1])
    xs = np.geomspace(lo, hi, n_points)
    xs = xs[(xs > w.support[0]) & (xs < w.support[1])]
    for start in range(0, xs.size, chunk):
        block = xs[start : start + chunk]
        if w.log_evaluator is not None:
            lv = np.asarray(w.log_evaluator(block), dtype=float)
            vals = np.where(np.isnan(lv), np.nan, 1.0)  # exp(log) is never negative
        else:
            vals = np.asarray(w.evaluator(block), dtype=float)
        bad = np.flatnonzero(~(vals >= 0))
        if bad.size:
            x = float(block[bad[0]])
            fx = float(w.evaluator(np.array([x]))[0]) if w.evaluator is not None else math.nan
            return PositivityVerdict(False, (x, w.normalization * fx), xs.size, (lo, hi))
    return PositivityVerdict(True, None, xs.size, (lo, hi))


# ---------------------------------------------------------------- functional equation


def ff_equation_residual(w: WeightObject, spec: PsiSpec, xs) -> float:
    """Max relative residual of ``x F(x) = psi(-x d/dx) F(x)`` on a grid.

    Only families where ``psi(-x d/dx)`` acts by rescaling ``x``:

    * ``PowerQ``: ``x F(x) - lam F(qx)``
    * ``SymBracket``: ``x F(x) - (F(x/q) - F(qx)) / (q - 1/q)``
    * ``JacksonBracket``: ``F(x/q) - (x(q-1) + 1) F(x)``
    """
    xs = np.asarray(xs, dtype=float)
    f, p = spec.family, spec.p
    if f == "PowerQ":
        lhs, rhs = xs * w(xs), p["lam"] * w(p["q"] * xs)
    elif f == "SymBracket":
        q = p["q"]
        lhs, rhs = xs * w(xs), (w(xs / q) - w(q * xs)) / (q - 1.0 / q)
    elif f == "JacksonBracket":
        q = p["q"]
        lhs, rhs = w(xs / q), (xs * (q - 1.0) + 1.0) * w(xs)
    else:
        raise UnsupportedError(
            f"{f}: psi(-x d/dx) is not a pure rescaling; the continuous equation is not used for this family"
        )
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    res = np.where(scale > 0, np.abs(lhs - rhs) / np.where(scale > 0, scale, 1.0), 0.0)
    return float(res.max())


# ---------------------------------------------------------------- periodic multipliers


def periodic_multiplier_family(w: WeightObject, eps: float, mode: int = 1) -> WeightObject:
    """``F0(x) (1 + eps cos(2 pi mode ln x / ln q))``, renormalised.

    The multiplier is invariant under ``x -> qx``, so moment ratios are
    unchanged.  ``|eps| < 1`` keeps the density positive.
    """
    if not abs(eps) < 1:
        raise ParameterError("|eps| must be < 1 to keep the weight positive")
    if "lam" not in w.params or w.kind != "Density":
        raise UnsupportedError("periodic multipliers are defined for the PowerQ log-normal weight")
    q = w.params["q"]
    base = w.log_evaluator
    k = 2.0 * math.pi * mode / math.log(q)

    def log_f(x):
        return base(x) + np.log1p(eps * np.cos(k * np.log(x)))

    out = replace(w, label=f"{w.label} x (1 + {eps:g} cos)", log_evaluator=log_f, log_mellin=None,
                  params={**w.params, "eps": eps, "mode": mode}, normalization=1.0)
    return _normalized(out)


# ---------------------------------------------------------------- Bernoulli / growth


@lru_cache(maxsize=None)
def _bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    # B_0..B_n with B_1 = -1/2, from sum_{k<m+1} C(m+1, k) B_k = 0
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    return tuple(B)


def bernoulli_polynomial(n: int) -> list[Fraction]:
    """Exact coefficients of ``B_n(x)``, lowest degree first."""
    B = _bernoulli_numbers(n)
    return [comb(n, k) * B[n - k] for k in range(n + 1)]


@dataclass(frozen=True)
class MellinSolution:
    """``log F^(rho) = sum_n a_n B_{n+1}(rho) / (n+1)`` as a polynomial in ``rho``.

    This solves ``F^(rho+1) = exp(sum a_n rho^n) F^(rho)``.
    """

    coeffs: tuple[float, ...]
    exponent: tuple[float, ...]  # polynomial coefficients, lowest degree first

    @property
    def p(self) -> int:
        return (len(self.coeffs) - 2) // 2

    def log_value(self, rho):
        return np.polynomial.polynomial.polyval(rho, self.exponent)

    def __call__(self, rho):
        return np.exp(self.log_value(rho))


def bernoulli_solution(coeffs) -> MellinSolution:
    """Mellin-side solution for ``psi(x) = exp(a_0 + a_1 x + ... + a_{2p+1} x^{2p+1})``."""
    coeffs = tuple(float(c) for c in coeffs)
    if len(coeffs) < 2 or len(coeffs) % 2:
        raise ParameterError("need coefficients a_0 .. a_{2p+1}")
    if not coeffs[-1] > 0:
        raise ParameterError("leading coefficient a_{2p+1} must be > 0")
    exp_poly = [Fraction(0)] * (len(coeffs) + 1)
    for n, a in enumerate(coeffs):
        frac = Fraction(a)
        for k, b in enumerate(bernoulli_polynomial(n + 1)):
            exp_poly[k] += frac * b / (n + 1)
    return MellinSolution(coeffs, tuple(float(c) for c in exp_poly))


@dataclass(frozen=True)
class GrowthVerdict:
    status: str  # "Exists" or "NonExistent"
    leading: float  # coefficient of sigma^(2p+2) in Re log F^(c + i sigma)
    confirmed: bool
    samples: dict
    reason: str
    solution: MellinSolution | None = None


def mellin_growth_test(sol: MellinSolution, c: float = 1.0) -> GrowthVerdict:
    """Decide whether ``F^`` can be a Mellin transform from its growth on
    ``Re rho = c``.

    The leading term of ``Re log F^(c + i sigma)`` is
    ``a_{2p+1} (-1)^(p+1) sigma^(2p+2) / (2p+2)``: a positive coefficient
    means ``|F^|`` blows up along the vertical line and no inverse exists.
    The sign is confirmed numerically at ``sigma = 10, 100``.
    """
    deg = len(sol.coeffs) - 1
    p = (deg - 1) // 2
    lead = sol.coeffs[-1] * (-1) ** (p + 1) / (2 * p + 2)
    if lead == 0:
        raise ParameterError("degenerate leading coefficient")
    base = float(np.real(sol.log_value(complex(c, 0.0))))
    samples = {s: float(np.real(sol.log_value(complex(c, s)))) - base for s in (10.0, 100.0)}
    confirmed = all(np.sign(v) == np.sign(lead) for v in samples.values())
    if lead > 0:
        return GrowthVerdict("NonExistent", lead, confirmed, samples, "Mellin growth on imaginary axis", sol)
    return GrowthVerdict("Exists", lead, confirmed, samples, "Mellin transform decays on vertical lines", sol)


# ---------------------------------------------------------------- generic integration


def integrate_against(w: WeightObject, g: Callable[[float], complex]) -> complex:
    """``int g(x) dF(x)`` with the normalised weight.

    Densities use quadrature in ``u = ln x``; atomic measures sum atoms
    until the masses become negligible.
    """
    if w.kind == "AtomicMeasure":
        total = 0.0
        for n in range(MAX_ATOMS):
            loc, lm = w.atom(n)
            term = math.exp(lm) * g(loc)
            total += term
            if n > 5 and abs(term) < ATOM_TERM_TOL * abs(total):
                return w.normalization * total
        raise ConvergenceError("atomic sum did not converge")
    if w.kind != "Density":
        raise UnsupportedError(f"{w.kind} weight cannot integrate")
    u_lo, u_hi = _u_bounds(w)
    ld = _log_density_u(w)
    us = np.linspace(u_lo, u_hi, 801)
    with np.errstate(all="ignore"):
        lv = np.asarray(ld(us), dtype=float) + us
    lv = np.where(np.isnan(lv), -np.inf, lv)
    m = lv.max()
    keep = np.flatnonzero(lv > m - 60.0)
    a, b = us[max(keep[0] - 1, 0)], us[min(keep[-1] + 1, us.size - 1)]

    def part(fn):
        return integrate.quad(fn, a, b, epsabs=0.0, epsrel=1e-10, limit=QUAD_LIMIT)[0]

    def dens(u):
        return math.exp(float(ld(np.array([u]))[0]) + u)

    re = part(lambda u: dens(u) * complex(g(math.exp(u))).real)
    im = part(lambda u: dens(u) * complex(g(math.exp(u))).imag)
    return w.normalization * complex(re, im)
