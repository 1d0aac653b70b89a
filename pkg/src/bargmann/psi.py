"""Spectral functions psi and the representation type they induce.

A deformed oscillator algebra is fixed by a real analytic function ``psi``
through ``a^dagger a = psi(N)`` and ``a a^dagger = psi(N + 1)``.  This module
holds the catalogue of families used throughout the package, their limits at
``+-inf``, their real zeros, and the classification of the resulting
representation (full lattice, half-infinite or finite).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, ParameterError, UnclassifiableError

__all__ = [
    "FAMILIES",
    "PsiSpec",
    "PsiLimits",
    "Zero",
    "SpectrumInfo",
    "psi_eval",
    "log_psi_eval",
    "psi_limits",
    "find_zeros",
    "classify",
    "q_bracket",
    "su_q2",
]

DEFAULT_WINDOW = (-64, 64)
SAMPLES_PER_UNIT = 16
INTEGER_TOL = 1e-9
ZERO_TOL = 1e-9
BISECT_TOL = 1e-12

# family -> (parameter names, defaults)
FAMILIES: dict[str, tuple[tuple[str, ...], dict[str, float]]] = {
    "Usual": (("sigma",), {"sigma": 0.0}),
    "QOsc": (("q", "sigma"), {"sigma": 0.0}),
    "QOscPrime": (("q", "sigma"), {"sigma": 0.0}),
    "SuQ2": (("q", "sigma"), {}),
    "SuQ11": (("q", "sigma"), {}),
    "PowerQ": (("lam", "q"), {}),
    "ExpPoly": ((), {}),  # a0, a1, ..., a_{2p+1}
    "RingPlus": (("a", "q"), {}),
    "RingInv": (("a", "q"), {}),
    "SymBracket": (("q",), {}),
    "JacksonBracket": (("q",), {}),
    "Monomial": (("n",), {}),
    "Custom": ((), {}),
}


def q_bracket(x, q):
    """Symmetric q-number ``[x] = (q^x - q^-x) / (q - 1/q)``."""
    x = np.asarray(x, dtype=float)
    return (q**x - q ** (-x)) / (q - 1.0 / q)


def _exp_poly_coeffs(params: dict[str, float]) -> list[float]:
    keys = sorted(params, key=lambda k: int(k[1:]))
    if [int(k[1:]) for k in keys] != list(range(len(keys))):
        raise ParameterError(f"ExpPoly needs consecutive coefficients a0..aK, got {keys}")
    return [float(params[k]) for k in keys]


@dataclass(frozen=True)
class PsiSpec:
    """A spectral function: family tag, parameters and representation offset.

    ``params`` may be given as a dict; it is stored as a sorted tuple of
    ``(name, value)`` pairs so that specs are hashable.  ``func`` is only used
    by the ``Custom`` family and must accept numpy arrays.
    """

    family: str
    params: tuple = ()
    mu: float = 0.0
    func: Callable | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown psi family {self.family!r}")
        raw = dict(self.params)
        names, defaults = FAMILIES[self.family]
        merged = {**defaults, **{k: float(v) for k, v in raw.items()}}
        if names:
            unknown = set(merged) - set(names)
            missing = set(names) - set(merged)
            if unknown or missing:
                raise ParameterError(
                    f"{self.family}: unknown params {sorted(unknown)}, missing {sorted(missing)}"
                )
        object.__setattr__(self, "params", tuple(sorted(merged.items())))
        object.__setattr__(self, "mu", float(self.mu))
        _validate(self)

    @property
    def p(self) -> dict[str, float]:
        return dict(self.params)

    def __call__(self, x):
        return psi_eval(self, x)

    def raw(self, x):
        """psi without the mu shift, vectorised, no error checking."""
        return _RAW[self.family](self, np.asarray(x, dtype=float))

    def with_mu(self, mu: float) -> "PsiSpec":
        return PsiSpec(self.family, self.p, mu, self.func)

    # JSON schema: {"family": str, "params": {name: number}, "mu": number}
    def to_dict(self) -> dict:
        if self.family == "Custom":
            raise ParameterError("Custom psi specs carry a callable and cannot be serialised")
        return {"family": self.family, "params": self.p, "mu": self.mu}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "PsiSpec":
        extra = set(data) - {"family", "params", "mu"}
        if extra:
            raise ParameterError(f"unknown PsiSpec fields {sorted(extra)}")
        if "family" not in data:
            raise ParameterError("PsiSpec needs a 'family' field")
        if data["family"] == "Custom":
            raise ParameterError("Custom psi cannot be built from JSON")
        params = data.get("params", {})
        if not isinstance(params, dict) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in params.values()
        ):
            raise ParameterError("'params' must map names to numbers")
        mu = data.get("mu", 0.0)
        if not isinstance(mu, (int, float)) or isinstance(mu, bool):
            raise ParameterError("'mu' must be a number")
        return cls(data["family"], params, mu)

    @classmethod
    def from_json(cls, text: str) -> "PsiSpec":
        return cls.from_dict(json.loads(text))

    @classmethod
    def custom(cls, func: Callable, mu: float = 0.0) -> "PsiSpec":
        return cls("Custom", {}, mu, func)


def _validate(spec: PsiSpec) -> None:
    f, p = spec.family, spec.p

    def need(cond, msg):
        if not cond:
            raise ParameterError(f"{f}: {msg}")

    if "q" in p and f != "PowerQ":
        need(p["q"] > 0 and p["q"] != 1.0, "q must be positive and != 1")
    if f == "PowerQ":
        need(p["lam"] > 0, "lam must be > 0")
        need(0 < p["q"] <= 1, "q must satisfy 0 < q <= 1")
    elif f == "RingPlus":
        need(p["a"] > 0 and p["q"] > 1, "needs a > 0 and q > 1")
    elif f == "RingInv":
        need(p["a"] > 0 and 0 < p["q"] < 1, "needs a > 0 and 0 < q < 1")
    elif f == "JacksonBracket":
        need(p["q"] > 1, "needs q > 1")
    elif f == "Monomial":
        need(p["n"] >= 1 and float(p["n"]).is_integer(), "n must be a positive integer")
    elif f == "ExpPoly":
        coeffs = _exp_poly_coeffs(p)
        need(len(coeffs) >= 2 and len(coeffs) % 2 == 0, "needs coefficients a0..a_{2p+1}")
        need(coeffs[-1] > 0, "leading coefficient a_{2p+1} must be > 0")
    elif f == "Custom":
        need(callable(spec.func), "Custom needs a callable")


def _raw_qosc(s, x):
    q, sig = s.p["q"], s.p["sigma"]
    return (-(q ** (-x)) + sig * q**x) / (q - 1.0 / q)


def _raw_exppoly(s, x):
    coeffs = _exp_poly_coeffs(s.p)
    with np.errstate(over="ignore"):
        return np.exp(np.polynomial.polynomial.polyval(x, coeffs))


def _raw_custom(s, x):
    return np.asarray(s.func(x), dtype=float)


_RAW = {
    "Usual": lambda s, x: x + s.p["sigma"],
    "QOsc": _raw_qosc,
    "QOscPrime": lambda s, x: 1.0 / (1.0 - s.p["q"]) + s.p["sigma"] * s.p["q"] ** x,
    "SuQ2": lambda s, x: s.p["sigma"] - q_bracket(x - 0.5, s.p["q"]) ** 2,
    "SuQ11": lambda s, x: q_bracket(x - 0.5, s.p["q"]) ** 2 - s.p["sigma"],
    "PowerQ": lambda s, x: s.p["lam"] * s.p["q"] ** (-x),
    "ExpPoly": _raw_exppoly,
    "RingPlus": lambda s, x: s.p["a"] + s.p["q"] ** x,
    "RingInv": lambda s, x: 1.0 / (s.p["q"] ** x + s.p["a"]),
    "SymBracket": lambda s, x: q_bracket(x, s.p["q"]),
    "JacksonBracket": lambda s, x: (s.p["q"] ** x - 1.0) / (s.p["q"] - 1.0),
    "Monomial": lambda s, x: x ** int(s.p["n"]),
    "Custom": _raw_custom,
}


def psi_eval(spec: PsiSpec, x):
    """Evaluate the shifted function ``psi_mu(x) = psi(mu + x)``.

    Accepts scalars or arrays; returns a float for scalar input.
    """
    xa = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        val = spec.raw(spec.mu + xa)
    if np.any(np.isnan(val)):
        raise DomainError(f"{spec.family}: psi undefined at x={x!r}")
    return float(val) if np.ndim(val) == 0 else val


_LOG_RAW = {
    "PowerQ": lambda s, x: math.log(s.p["lam"]) - x * math.log(s.p["q"]),
    "ExpPoly": lambda s, x: np.polynomial.polynomial.polyval(x, _exp_poly_coeffs(s.p)),
}


def log_psi_eval(spec: PsiSpec, x):
    """``log psi_mu(x)`` without overflow for the exponential families.

    Other families fall back to ``log(psi_eval)``; values must be positive.
    """
    xa = np.asarray(x, dtype=float)
    if spec.family in _LOG_RAW:
        out = np.asarray(_LOG_RAW[spec.family](spec, spec.mu + xa), dtype=float)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(np.asarray(psi_eval(spec, xa), dtype=float))
    return float(out) if out.ndim == 0 else out


def su_q2(q: float, l: int, mu: float = 0.0) -> PsiSpec:
    """su_q(2) function with ``sigma = [l + 1/2]^2`` (spin ``l`` representation)."""
    sigma = float(q_bracket(l + 0.5, q)) ** 2
    return PsiSpec("SuQ2", {"q": q, "sigma": sigma}, mu)


class PsiLimits(NamedTuple):
    """Limits of ``psi_mu`` at ``-inf`` and ``+inf``.

    ``None`` marks a limit that does not exist; ``estimated`` is set when the
    values come from sampling rather than a closed form.
    """

    lower: float | None
    upper: float | None
    estimated: bool = False


def _combo_limit(c_plus, c_minus, c0, q, direction):
    # limit of c_plus q^x + c_minus q^-x + c0 as x -> direction * inf
    if q == 1.0:
        return c_plus + c_minus + c0
    grows_plus = (q > 1) == (direction > 0)
    dominant = c_plus if grows_plus else c_minus
    if dominant != 0:
        return math.copysign(math.inf, dominant)
    return c0


def _sign_inf(v):
    return math.copysign(math.inf, v)


def psi_limits(spec: PsiSpec, horizon: int = 10) -> PsiLimits:
    """Return ``(psi(-inf), psi(+inf))``.

    Catalogue families use closed forms.  ``Custom`` functions are sampled at
    ``x = +-2^k`` for ``k <= horizon`` and the result is flagged as estimated.
    A shift by ``mu`` does not change the limits.
    """
    f, p = spec.family, spec.p
    if f == "Custom":
        return PsiLimits(_estimate_limit(spec, -1, horizon), _estimate_limit(spec, 1, horizon), True)
    lims = []
    for d in (-1, 1):
        if f == "Usual":
            lim = _sign_inf(d)
        elif f == "QOsc":
            dq = p["q"] - 1.0 / p["q"]
            lim = _combo_limit(p["sigma"] / dq, -1.0 / dq, 0.0, p["q"], d)
        elif f == "QOscPrime":
            lim = _combo_limit(p["sigma"], 0.0, 1.0 / (1.0 - p["q"]), p["q"], d)
        elif f == "SuQ2":
            lim = -math.inf
        elif f == "SuQ11":
            lim = math.inf
        elif f == "PowerQ":
            lim = _combo_limit(0.0, p["lam"], 0.0, p["q"], d)
        elif f == "ExpPoly":
            coeffs = _exp_poly_coeffs(p)
            lead = coeffs[-1] * (d ** (len(coeffs) - 1))
            lim = math.inf if lead > 0 else 0.0
        elif f == "RingPlus":
            lim = math.inf if d > 0 else p["a"]
        elif f == "RingInv":
            lim = 1.0 / p["a"] if d > 0 else 0.0
        elif f == "SymBracket":
            dq = p["q"] - 1.0 / p["q"]
            lim = _combo_limit(1.0 / dq, -1.0 / dq, 0.0, p["q"], d)
        elif f == "JacksonBracket":
            c = 1.0 / (p["q"] - 1.0)
            lim = _combo_limit(c, 0.0, -c, p["q"], d)
        elif f == "Monomial":
            n = int(p["n"])
            lim = math.inf if (d > 0 or n % 2 == 0) else -math.inf
        lims.append(float(lim))
    return PsiLimits(lims[0], lims[1], False)


def _estimate_limit(spec: PsiSpec, direction: int, horizon: int) -> float | None:
    xs = direction * 2.0 ** np.arange(horizon + 1)
    with np.errstate(all="ignore"):
        v = np.asarray(spec.raw(spec.mu + xs), dtype=float)
    if np.any(np.isnan(v)):
        return None
    if np.isinf(v[-1]):
        return _sign_inf(v[-1])
    d = np.diff(v)[-4:]
    if np.all(d == 0):
        return float(v[-1])
    same_sign = np.all(np.sign(d) == np.sign(d[-1]))
    shrinking = np.all(np.abs(d[1:]) < 0.75 * np.abs(d[:-1]))
    if same_sign and shrinking or np.all(np.abs(d) < 1e-13 * max(1.0, abs(v[-1]))):
        # Aitken extrapolation on the last three samples
        denom = d[-1] - d[-2]
        if denom == 0:
            return float(v[-1])
        return float(v[-1] - d[-1] ** 2 / denom)
    if same_sign and np.all(np.abs(d[1:]) >= 0.75 * np.abs(d[:-1])):
        return _sign_inf(d[-1])
    return None


class Zero(NamedTuple):
    location: float
    is_integer_offset: bool


def _sample_grid(window, samples_per_unit):
    lo, hi = window
    if hi < lo:
        raise ParameterError(f"empty window {window}")
    n = int(round((hi - lo) * samples_per_unit)) + 1
    return np.linspace(lo, hi, n)


def find_zeros(
    spec: PsiSpec,
    window: tuple[int, int] = DEFAULT_WINDOW,
    samples_per_unit: int = SAMPLES_PER_UNIT,
) -> list[Zero]:
    """Real zeros of ``psi_mu`` in ``window`` located by sign changes.

    Each bracket is refined with Brent's method to ``1e-12``.  Samples that
    are exactly zero count as zeros when the sign changes across them.
    """
    xs = _sample_grid(window, samples_per_unit)
    with np.errstate(all="ignore"):
        vs = np.asarray(spec.raw(spec.mu + xs), dtype=float)
    def fn(t):
        return float(spec.raw(spec.mu + t))

    out: list[Zero] = []
    nz = np.flatnonzero(np.isfinite(vs) & (vs != 0))
    for a, b in zip(nz[:-1], nz[1:]):
        if np.sign(vs[a]) == np.sign(vs[b]):
            continue
        if b - a > 1:
            z = float(xs[(a + b) // 2])  # exact zero on a sample
        else:
            z = brentq(fn, xs[a], xs[b], xtol=BISECT_TOL, rtol=4 * np.finfo(float).eps)
        # a sign change through a pole is not a zero
        if abs(fn(z)) > 1e-10 * max(1.0, abs(vs[a]), abs(vs[b])):
            continue
        out.append(Zero(z, abs(z - round(z)) < INTEGER_TOL))
    return out


@dataclass(frozen=True)
class SpectrumInfo:
    """Spectrum type of ``N`` on the lattice ``mu + Z``.

    ``kind`` is one of ``"FullZ"``, ``"HalfUp"`` (lowest weight ``nu_minus``),
    ``"HalfDown"`` (highest weight ``nu_plus``) or ``"Finite"``.
    """

    kind: str
    nu_minus: int | None = None
    nu_plus: int | None = None
    window: tuple[int, int] = DEFAULT_WINDOW

    @property
    def has_lowest_weight(self) -> bool:
        return self.nu_minus is not None

    @property
    def has_highest_weight(self) -> bool:
        return self.nu_plus is not None

    @property
    def dimension(self) -> float:
        if self.kind == "Finite":
            return self.nu_plus - self.nu_minus + 1
        return math.inf

    def contains(self, n: int) -> bool:
        lo = -math.inf if self.nu_minus is None else self.nu_minus
        hi = math.inf if self.nu_plus is None else self.nu_plus
        return lo <= n <= hi

    def default_range(self) -> tuple[int, int]:
        """Default truncation of the basis used by the matrix and series code."""
        if self.kind == "Finite":
            return self.nu_minus, self.nu_plus
        if self.kind == "HalfUp":
            return self.nu_minus, self.nu_minus + 32
        if self.kind == "HalfDown":
            return self.nu_plus - 32, self.nu_plus
        return -16, 16

    def to_dict(self) -> dict:
        d = self.dimension
        return {
            "kind": self.kind,
            "nu_minus": self.nu_minus,
            "nu_plus": self.nu_plus,
            "has_lowest_weight": self.has_lowest_weight,
            "has_highest_weight": self.has_highest_weight,
            "dimension": d if math.isfinite(d) else "inf",
            "window": list(self.window),
        }


# families that never vanish; their lattice values may underflow in the tails
_POSITIVE = {"PowerQ", "ExpPoly", "RingPlus", "RingInv"}


def _is_lattice_zero(v, neighbours) -> bool:
    # relative to the neighbourhood, so tiny positive tails are not zeros
    scale = max(abs(u) for u in neighbours if np.isfinite(u))
    return v == 0 or abs(v) <= ZERO_TOL * scale


@lru_cache(maxsize=256)
def classify(
    spec: PsiSpec,
    window: tuple[int, int] = DEFAULT_WINDOW,
    samples_per_unit: int = SAMPLES_PER_UNIT,
) -> SpectrumInfo:
    """Classify the representation built on ``|0>`` with ``N|0> = mu|0>``.

    Raising states from ``|0>`` stops at the first ``n`` with
    ``psi(mu + n + 1) == 0`` (highest weight), lowering stops at the first
    ``n`` with ``psi(mu + n) == 0`` (lowest weight).  A negative value met
    before a zero, or negative samples of ``psi`` between the weights, means
    no representation exists for this ``mu`` inside the window.
    """
    lo, hi = window
    if lo > 0 or hi < 0:
        raise ParameterError("window must contain 0")
    if spec.family in _POSITIVE:
        return SpectrumInfo("FullZ", None, None, tuple(window))
    ns = np.arange(lo - 1, hi + 2)
    with np.errstate(all="ignore"):
        vals = np.asarray(spec.raw(spec.mu + ns.astype(float)), dtype=float)
    at = {int(n): float(v) for n, v in zip(ns, vals)}

    def nb(n):
        return [at.get(n - 1, 0.0), at.get(n + 1, 0.0)]

    nu_plus = None
    for n in range(0, hi):
        v = at[n + 1]
        if _is_lattice_zero(v, nb(n + 1)):
            nu_plus = n
            break
        if not v > 0:
            raise UnclassifiableError(
                f"psi({spec.mu + n + 1:g}) = {v:g} <= 0 with no lattice zero; "
                f"no representation for mu={spec.mu:g} in window {window}"
            )
    nu_minus = None
    for n in range(0, lo - 1, -1):
        v = at[n]
        if _is_lattice_zero(v, nb(n)):
            nu_minus = n
            break
        if not v > 0:
            raise UnclassifiableError(
                f"psi({spec.mu + n:g}) = {v:g} <= 0 with no lattice zero; "
                f"no representation for mu={spec.mu:g} in window {window}"
            )
    # psi must stay positive between the weights, not only on the lattice
    a = lo if nu_minus is None else nu_minus
    b = hi if nu_plus is None else nu_plus + 1
    if b - a > 0:
        xs = _sample_grid((a, b), samples_per_unit)[1:-1]
        with np.errstate(all="ignore"):
            vs = np.asarray(spec.raw(spec.mu + xs), dtype=float)
        bad = np.flatnonzero(~(vs > 0))
        if bad.size:
            x = xs[bad[0]]
            raise UnclassifiableError(
                f"psi is not positive at x={x:g} inside the spectrum interval; window {window}"
            )
    if nu_minus is None and nu_plus is None:
        kind = "FullZ"
    elif nu_plus is None:
        kind = "HalfUp"
    elif nu_minus is None:
        kind = "HalfDown"
    else:
        kind = "Finite"
    return SpectrumInfo(kind, nu_minus, nu_plus, tuple(window))

