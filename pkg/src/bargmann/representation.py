"""Ladder representation on the number basis ``|n>``.

The normalisation constants are the two-sided running products of ``psi``
(the ``psi``-factorials).  We use the convention that makes them satisfy
``value(n) = psi(mu + n) * value(n - 1)`` for every ``n`` in the spectrum,
so that ``value(n)`` is also the target moment ``F^(n + 1)`` of a weight
function::

    value(n) = psi(mu+1) ... psi(mu+n)            n > 0
    value(0) = 1
    value(n) = 1 / (psi(mu+n+1) ... psi(mu))      n < 0
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .psi import PsiSpec, SpectrumInfo, classify, log_psi_eval, psi_eval

__all__ = [
    "PsiFactorial",
    "psi_factorial",
    "log_psi_factorial",
    "factorial_table",
    "TruncatedRep",
    "AlgebraReport",
    "build_truncated",
    "verify_algebra",
    "rep_header",
    "rep_entries",
]


class PsiFactorial:
    """Cached ``log value(n)`` for one spec.

    Entries are filled in contiguous blocks under a lock, so concurrent
    readers see each key inserted at most once.
    """

    def __init__(self, spec: PsiSpec, info: SpectrumInfo | None = None):
        self.spec = spec
        self.info = info if info is not None else classify(spec)
        self._lock = threading.Lock()
        self._cache: dict[int, float] = {0: 0.0}
        self._hi = 0
        self._lo = 0

    def _extend(self, n: int) -> None:
        with self._lock:
            if n > self._hi:
                ks = np.arange(self._hi + 1, n + 1)
                logs = np.asarray(log_psi_eval(self.spec, ks.astype(float)), dtype=float)
                acc = self._cache[self._hi] + np.cumsum(logs)
                self._cache.update(zip(ks.tolist(), acc.tolist()))
                self._hi = n
            elif n < self._lo:
                # value(k - 1) = value(k) / psi(k)
                ks = np.arange(self._lo, n, -1)
                logs = np.asarray(log_psi_eval(self.spec, ks.astype(float)), dtype=float)
                acc = self._cache[self._lo] - np.cumsum(logs)
                self._cache.update(zip((ks - 1).tolist(), acc.tolist()))
                self._lo = n

    def log_value(self, n: int) -> float:
        n = int(n)
        if not self.info.contains(n):
            raise DomainError(f"n={n} is outside the spectrum ({self.info.kind})")
        if n not in self._cache:
            self._extend(n)
        return self._cache[n]

    def log_values(self, n_min: int, n_max: int) -> np.ndarray:
        self.log_value(n_min)
        self.log_value(n_max)
        return np.array([self._cache[n] for n in range(n_min, n_max + 1)])

    def value(self, n: int) -> float:
        lv = self.log_value(n)
        if abs(lv) < 600.0 and abs(n) <= 64:
            # direct product keeps exact integer factorials exact
            if n >= 0:
                ks = np.arange(1, n + 1, dtype=float)
                return float(np.prod(psi_eval(self.spec, ks))) if n else 1.0
            ks = np.arange(n + 1, 1, dtype=float)
            return float(1.0 / np.prod(psi_eval(self.spec, ks)))
        return math.exp(lv)


@lru_cache(maxsize=128)
def _factorial_for(spec: PsiSpec) -> PsiFactorial:
    return PsiFactorial(spec)


def log_psi_factorial(spec: PsiSpec, n: int) -> float:
    return _factorial_for(spec).log_value(n)


def psi_factorial(spec: PsiSpec, n: int) -> float:
    """Two-sided ``psi``-factorial ``value(n)``; ``value(0) = 1``.

    Raises :class:`DomainError` when ``n`` lies beyond a weight state.
    """
    return _factorial_for(spec).value(n)


def factorial_table(spec: PsiSpec, n_min: int, n_max: int) -> np.ndarray:
    """Log ``psi``-factorials for ``n_min..n_max`` (inclusive)."""
    return _factorial_for(spec).log_values(n_min, n_max)


def _lattice_psi(spec: PsiSpec, info: SpectrumInfo, ns: np.ndarray) -> np.ndarray:
    vals = np.asarray(psi_eval(spec, ns.astype(float)), dtype=float).copy()
    # weight states are exact zeros of psi on the lattice
    if info.nu_minus is not None:
        vals[ns == info.nu_minus] = 0.0
    if info.nu_plus is not None:
        vals[ns == info.nu_plus + 1] = 0.0
    return vals


@dataclass(frozen=True)
class TruncatedRep:
    """Dense matrices of ``a``, ``a^dagger`` and ``N`` on ``n_min..n_max``.

    Row/column ``i`` corresponds to the basis vector ``|n_min + i>``.
    """

    spec: PsiSpec
    info: SpectrumInfo
    n_min: int
    n_max: int
    a: np.ndarray
    adag: np.ndarray
    N: np.ndarray

    @property
    def ns(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    def lowering_coefficient(self, n: int) -> float:
        """``sqrt(psi(mu + n))``, the amplitude of ``a|n> = c |n-1>``."""
        return float(np.sqrt(_lattice_psi(self.spec, self.info, np.array([n]))[0]))

    def raising_coefficient(self, n: int) -> float:
        """``sqrt(psi(mu + n + 1))``; exactly 0 at a highest weight state."""
        return float(np.sqrt(_lattice_psi(self.spec, self.info, np.array([n + 1]))[0]))


MATRIX_LOG_LIMIT = 345.0  # |log psi| below this keeps products of entries finite


def matrix_range(spec: PsiSpec, info: SpectrumInfo | None = None) -> tuple[int, int]:
    """Default truncation, narrowed on open ends until ``psi`` is representable.

    Fast-growing families (``exp`` of a cubic, say) would otherwise put
    ``inf`` or ``0`` into the matrices at the edges.
    """
    info = info if info is not None else classify(spec)
    lo, hi = info.default_range()
    while hi > max(lo, 1) and info.nu_plus is None and abs(log_psi_eval(spec, float(hi + 1))) > MATRIX_LOG_LIMIT:
        hi -= 1
    while lo < min(hi, -1) and info.nu_minus is None and abs(log_psi_eval(spec, float(lo))) > MATRIX_LOG_LIMIT:
        lo += 1
    return lo, hi


def build_truncated(spec: PsiSpec, n_min: int | None = None, n_max: int | None = None) -> TruncatedRep:
    """Truncated ladder matrices on ``[n_min, n_max]``.

    Defaults to ``[nu_-, nu_- + 32]`` for half-infinite spectra, ``[-16, 16]``
    for the full lattice and the whole spectrum for finite representations,
    narrowed where ``psi`` would overflow (see :func:`matrix_range`).
    """
    info = classify(spec)
    d_lo, d_hi = matrix_range(spec, info)
    n_min = d_lo if n_min is None else int(n_min)
    n_max = d_hi if n_max is None else int(n_max)
    if n_max < n_min:
        raise DomainError(f"empty basis range [{n_min}, {n_max}]")
    if not (info.contains(n_min) and info.contains(n_max)):
        raise DomainError(f"range [{n_min}, {n_max}] leaves the spectrum ({info.kind})")
    ns = np.arange(n_min, n_max + 1)
    psi_n = _lattice_psi(spec, info, ns)
    if np.any(psi_n < 0):
        raise DomainError("psi is negative inside the requested range")
    size = ns.size
    a = np.zeros((size, size))
    idx = np.arange(1, size)
    a[idx - 1, idx] = np.sqrt(psi_n[1:])
    N = np.diag(spec.mu + ns.astype(float))
    return TruncatedRep(spec, info, n_min, n_max, a, a.T.copy(), N)


@dataclass(frozen=True)
class AlgebraReport:
    """Max deviations of the defining relations on a truncation.

    ``*_abs`` are max-norms of the matrix differences; ``*_rel`` divide each
    row by the largest entry of the corresponding target row (or 1).
    """

    comm_a_abs: float
    comm_adag_abs: float
    ata_abs: float
    aat_abs: float
    comm_a_rel: float
    comm_adag_rel: float
    ata_rel: float
    aat_rel: float
    ata_rows: tuple[int, int]
    aat_rows: tuple[int, int]

    @property
    def max_rel(self) -> float:
        return max(self.comm_a_rel, self.comm_adag_rel, self.ata_rel, self.aat_rel)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"max_rel": self.max_rel}


def _row_dev(diff: np.ndarray, target: np.ndarray) -> tuple[float, float]:
    if diff.size == 0:
        return 0.0, 0.0
    absdev = np.max(np.abs(diff), axis=1)
    scale = np.maximum(np.max(np.abs(target), axis=1), 1.0)
    return float(absdev.max()), float((absdev / scale).max())


def verify_algebra(rep: TruncatedRep) -> AlgebraReport:
    """Check ``[a,N] = a``, ``[a^dagger,N] = -a^dagger``, ``a^dagger a = psi(N)``
    and ``a a^dagger = psi(N+1)`` on the truncation.

    The boundary row of ``a^dagger a`` (bottom) and of ``a a^dagger`` (top) is
    skipped unless it is a true weight state.
    """
    a, ad, N = rep.a, rep.adag, rep.N
    ns = rep.ns
    psi_n = _lattice_psi(rep.spec, rep.info, ns)
    psi_n1 = _lattice_psi(rep.spec, rep.info, ns + 1)

    comm_a = a @ N - N @ a
    comm_ad = ad @ N - N @ ad
    ca = _row_dev(comm_a - a, a)
    cad = _row_dev(comm_ad + ad, ad)

    lo = 0 if rep.n_min == rep.info.nu_minus else 1
    hi = rep.size if rep.n_max == rep.info.nu_plus else rep.size - 1
    ata = ad @ a - np.diag(psi_n)
    aat = a @ ad - np.diag(psi_n1)
    d1 = _row_dev(ata[lo:], np.diag(psi_n)[lo:])
    d2 = _row_dev(aat[:hi], np.diag(psi_n1)[:hi])
    return AlgebraReport(
        ca[0], cad[0], d1[0], d2[0], ca[1], cad[1], d1[1], d2[1],
        (int(ns[lo]) if lo < rep.size else rep.n_max + 1, rep.n_max),
        (rep.n_min, int(ns[hi - 1]) if hi > 0 else rep.n_min - 1),
    )


def rep_header(rep: TruncatedRep) -> dict:
    """JSON-ready header describing a truncation."""
    return {"spec": rep.spec.to_dict(), "n_min": rep.n_min, "n_max": rep.n_max,
            "spectrum": rep.info.to_dict()}


def rep_entries(rep: TruncatedRep) -> list[tuple[str, int, int, float]]:
    """Nonzero entries as ``(matrix, row n, column n, value)``."""
    out = []
    for name in ("a", "adag", "N"):
        m = getattr(rep, name)
        for i, j in zip(*np.nonzero(m)):
            out.append((name, int(rep.n_min + i), int(rep.n_min + j), float(m[i, j])))
    return out
