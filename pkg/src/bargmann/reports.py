"""Report containers and deterministic JSON/CSV writers."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable


def fmt_float(v: float) -> str:
    """17 significant digits, with ``inf``/``nan`` spelled out."""
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats fixed at 17 significant digits.

    Non-finite floats are emitted as strings so the output stays valid JSON.
    Keys are sorted, which makes the output byte-identical across runs.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        s = fmt_float(obj)
        return s if math.isfinite(obj) else f'"{s}"'
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@dataclass
class MomentRow:
    n: int
    target: float
    computed: float
    rel_error: float
    converged: bool = True
    note: str = ""


@dataclass
class MomentReport:
    """Computed moments ``F^(n+1)`` against the targets ``value(n)``."""

    method: str
    rows: list[MomentRow] = field(default_factory=list)
    tol: float = 1e-6
    notes: dict = field(default_factory=dict)

    @property
    def max_rel_error(self) -> float:
        return max((r.rel_error for r in self.rows), default=0.0)

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.rows)

    @property
    def passed(self) -> bool:
        return self.all_converged and self.max_rel_error < self.tol

    def computed(self) -> dict[int, float]:
        return {r.n: r.computed for r in self.rows}

    def ratios(self) -> dict[int, float]:
        """``F^(n) / F^(n-1)`` keyed by ``n``, for consecutive computed moments."""
        c = self.computed()
        return {n: c[n] / c[n - 1] for n in c if n - 1 in c}

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "tol": self.tol,
            "max_rel_error": self.max_rel_error,
            "passed": self.passed,
            "rows": [
                {"n": r.n, "target": r.target, "computed": r.computed,
                 "rel_error": r.rel_error, "converged": r.converged, "note": r.note}
                for r in self.rows
            ],
            **({"notes": self.notes} if self.notes else {}),
        }

    def to_csv(self) -> str:
        return rows_to_csv(
            ["n", "target", "computed", "rel_error", "method"],
            [(r.n, r.target, r.computed, r.rel_error, self.method) for r in self.rows],
        )


def rel_error(computed: float, target: float) -> float:
    if target == computed:
        return 0.0
    if target == 0:
        return abs(computed)
    return abs(computed - target) / abs(target)


def rows_to_csv(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([fmt_float(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
