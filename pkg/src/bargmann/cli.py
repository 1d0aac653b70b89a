"""Command-line front end.

    bargmann classify --family PowerQ --param lam=1.5 --param q=0.5
    bargmann verify   --config run.json --out report.json
    bargmann sample   --family Usual --what kernel --range 0:4 --points 33 --format csv

Exit codes: 0 ok, 2 invalid configuration, 3 unclassifiable spectrum,
4 weight proven not to exist, 5 tolerance failure or unexpected error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coherent import coherent_domain, coherent_vector, eigen_residual
from .errors import (
    DomainError,
    NoClosedFormError,
    ParameterError,
    UnclassifiableError,
    UndecidedError,
    UnsupportedError,
)
from .kernel import kernel_eval, kernel_functional_check
from .psi import PsiSpec, classify, psi_eval, psi_limits
from .reports import dumps, rows_to_csv
from .representation import build_truncated, rep_entries, rep_header, verify_algebra
from .weight import (
    closed_form_weight,
    ff_equation_residual,
    positivity_scan,
    powerq_moment_sign,
    verify_moments,
)

EXIT_OK, EXIT_CONFIG, EXIT_UNCLASSIFIABLE, EXIT_NONEXISTENT, EXIT_FAIL = 0, 2, 3, 4, 5

SECTIONS = {
    "classify": set(),
    "verify": {"range", "tol"},
    "sample": {"what", "range", "points"},
}
TOP_LEVEL = {"family", "params", "mu", "format", "out"} | set(SECTIONS)

# family -> (moment n range, tolerance) used by verify
MOMENT_DEFAULTS = {
    "Usual": ((0, 12), 1e-10),
    "PowerQ": ((-7, 8), 1e-8),
    "ExpPoly": ((-7, 8), 1e-8),
    "RingPlus": ((0, 10), 1e-12),
    "RingInv": ((0, 10), 1e-12),
    "SymBracket": ((0, 10), 1e-6),
    "QOsc": ((0, 10), 1e-6),
    "JacksonBracket": ((0, 10), 1e-6),
    "Monomial": ((0, 8), 1e-6),
}
ALGEBRA_TOL = 1e-12
RESIDUAL_TOL = 1e-10
FUNCTIONAL_TOL = 1e-10
FF_TOL = 1e-10
N_SAMPLED_Z = 5


class ConfigError(Exception):
    pass


class NonExistentWeight(Exception):
    pass


# ---------------------------------------------------------------- config


def _parse_range(text: str, cast=float) -> tuple:
    try:
        a, b = text.split(":")
        lo, hi = cast(a), cast(b)
    except ValueError as exc:
        raise ConfigError(f"--range expects a:b, got {text!r}") from exc
    if not lo < hi:
        raise ConfigError(f"empty range {text!r}")
    return lo, hi


def _parse_param(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise ConfigError(f"--param expects k=v, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k.strip(), float(v)
    except ValueError as exc:
        raise ConfigError(f"--param {k}: {v!r} is not a number") from exc


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(data) - TOP_LEVEL
    if extra:
        raise ConfigError(f"unknown config fields {sorted(extra)}")
    for name, allowed in SECTIONS.items():
        sec = data.get(name, {})
        if not isinstance(sec, dict):
            raise ConfigError(f"section {name!r} must be an object")
        bad = set(sec) - allowed
        if bad:
            raise ConfigError(f"unknown fields in {name!r}: {sorted(bad)}")
    return data


def resolve(args: argparse.Namespace) -> tuple[PsiSpec, dict]:
    """Merge the config file with flags (flags win) into a spec and settings."""
    cfg = load_config(args.config)
    section = dict(cfg.get(args.command, {}))
    params = dict(cfg.get("params", {}))
    for item in args.param or []:
        k, v = _parse_param(item)
        params[k] = v
    family = args.family or cfg.get("family")
    if family is None:
        raise ConfigError("no psi family given (use --family or a config file)")
    mu = args.mu if args.mu is not None else cfg.get("mu", 0.0)
    spec = PsiSpec.from_dict({"family": family, "params": params, "mu": mu})

    fmt = args.format or cfg.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"unknown format {fmt!r}")
    settings = {"format": fmt, "out": args.out or cfg.get("out")}
    if args.command == "verify":
        rng_default, tol_default = MOMENT_DEFAULTS.get(family, ((0, 8), 1e-6))
        rng = _parse_range(args.range, int) if args.range else tuple(section.get("range", rng_default))
        tol = args.tol if args.tol is not None else section.get("tol", tol_default)
        if not (isinstance(tol, (int, float)) and tol > 0):
            raise ConfigError("tolerance must be positive")
        if len(rng) != 2 or not rng[0] < rng[1]:
            raise ConfigError(f"moment range must be a nonempty pair, got {rng}")
        settings.update(range=[int(rng[0]), int(rng[1])], tol=float(tol))
    elif args.command == "sample":
        what = args.what or section.get("what")
        points = args.points if args.points is not None else section.get("points")
        rng = _parse_range(args.range) if args.range else section.get("range")
        if points is not None and (not isinstance(points, int) or points < 1):
            raise ConfigError("points must be a positive integer")
        if rng is not None and (len(rng) != 2 or not rng[0] < rng[1]):
            raise ConfigError(f"range must be a nonempty pair, got {rng}")
        settings.update(what=what, points=points, range=list(rng) if rng is not None else None)
    return spec, settings


def header(command: str, spec: PsiSpec, settings: dict) -> dict:
    return {"version": __version__, "command": command, "spec": spec.to_dict(), "settings": settings}


# ---------------------------------------------------------------- commands


def _domain_summary(spec: PsiSpec) -> dict:
    try:
        dom = coherent_domain(spec)
    except UndecidedError as exc:
        return {"operator": "Undecided", "shape": "Undecided", "r1": None, "r2": None, "reason": str(exc)}
    return dom.to_dict()


def cmd_classify(spec: PsiSpec, settings: dict) -> tuple[int, dict]:
    info = classify(spec)
    lim = psi_limits(spec)
    result = info.to_dict()
    result.update(_domain_summary(spec))
    result["limits"] = {"lower": lim.lower, "upper": lim.upper, "estimated": lim.estimated}
    return EXIT_OK, result


def _sample_z(dom) -> list[complex]:
    r2 = dom.r2
    radius = (dom.r1 + min(r2, dom.r1 + 2.0)) / 2.0
    return [radius * complex(math.cos(a), math.sin(a)) for a in 2 * math.pi * np.arange(N_SAMPLED_Z) / N_SAMPLED_Z + 0.3]


def _check(name, passed, value, tol, detail=None) -> dict:
    return {"name": name, "passed": bool(passed), "value": value, "tol": tol, "detail": detail or {}}


def cmd_verify(spec: PsiSpec, settings: dict) -> tuple[int, dict]:
    checks: list[dict] = []
    extras: dict = {}
    info = classify(spec)

    rep = build_truncated(spec)
    alg = verify_algebra(rep)
    checks.append(_check("algebra", alg.max_rel < ALGEBRA_TOL, alg.max_rel, ALGEBRA_TOL,
                         {"n_min": rep.n_min, "n_max": rep.n_max, **alg.to_dict()}))

    dom = _domain_summary(spec)
    extras["coherent_domain"] = dom
    if dom["operator"] in ("A", "ADagger"):
        d = coherent_domain(spec)
        zs = _sample_z(d)
        res = [eigen_residual(rep, coherent_vector(spec, z)) for z in zs]
        checks.append(_check("coherent_residual", max(res) < RESIDUAL_TOL, max(res), RESIDUAL_TOL,
                             {"z": [[z.real, z.imag] for z in zs]}))
        fe = kernel_functional_check(spec, [abs(z) ** 2 for z in zs])
        checks.append(_check("kernel_functional", fe < FUNCTIONAL_TOL, fe, FUNCTIONAL_TOL))

    code = EXIT_OK
    try:
        w = closed_form_weight(spec)
    except NoClosedFormError as exc:
        w = None
        extras["weight"] = {"kind": "NoClosedForm", "reason": str(exc)}
    if w is not None:
        extras["weight"] = {"kind": w.kind, "label": w.label, "normalization": w.normalization, "reason": w.reason}
        if w.kind == "NonExistent":
            code = EXIT_NONEXISTENT
        elif w.exists:
            lo, hi = settings["range"]
            if not (info.contains(lo) and info.contains(hi)):
                raise DomainError(f"moment range [{lo}, {hi}] leaves the spectrum")
            rep_m = verify_moments(w, spec, (lo, hi), settings["tol"])
            extras["moments"] = rep_m.to_dict()
            checks.append(_check("moments", rep_m.passed, rep_m.max_rel_error, settings["tol"],
                                 {"method": rep_m.method, "range": [lo, hi]}))
            ratios = rep_m.ratios()
            worst = max((abs(r / psi_eval(spec, n) - 1.0) for n, r in ratios.items()), default=0.0)
            checks.append(_check("moment_ratios", rep_m.all_converged and worst < settings["tol"], worst,
                                 settings["tol"]))
            if spec.family == "PowerQ":
                extras["moment_sign"] = powerq_moment_sign(w, spec, (max(lo, -6), min(hi, 8)))
            if w.kind == "Density" and (w.log_evaluator is not None or w.evaluator is not None):
                pos = positivity_scan(w)
                checks.append(_check("positivity", pos.nonnegative, 0.0 if pos.nonnegative else pos.witness[1],
                                     0.0, pos.to_dict()))
                if spec.family in ("PowerQ", "SymBracket", "JacksonBracket"):
                    xs = np.geomspace(0.1, 10.0, 25) * w.scale
                    ff = ff_equation_residual(w, spec, xs)
                    checks.append(_check("ff_equation", ff < FF_TOL, ff, FF_TOL))
    if code == EXIT_OK and not all(c["passed"] for c in checks):
        code = EXIT_FAIL
    return code, {"checks": checks, **extras}


def _sample_grid(settings: dict, lo: float, hi: float, log: bool) -> np.ndarray:
    n = settings["points"] or 33
    if settings["range"] is not None:
        return np.linspace(settings["range"][0], settings["range"][1], n)
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def cmd_sample(spec: PsiSpec, settings: dict) -> tuple[int, dict]:
    what = settings["what"]
    if what is None:
        try:
            w = closed_form_weight(spec)
            what = "atoms" if w.kind == "AtomicMeasure" else "density" if w.kind == "Density" else "kernel"
        except NoClosedFormError:
            what = "kernel"
        settings["what"] = what
    if what == "kernel":
        dom = coherent_domain(spec)
        if dom.operator == "None":
            raise DomainError(f"no kernel: {dom.reason}")
        if dom.shape == "Disc":
            lo, hi = 0.0, min(4.0, 0.9 * dom.r2**2)
        else:
            lo = max(dom.r1**2 * 1.01, 1e-2)
            hi = min(lo + 4.0, 0.9 * dom.r2**2) if math.isfinite(dom.r2) else lo + 4.0
        xs = _sample_grid(settings, lo, hi, log=False)
        rows = []
        for x in xs:
            kv = kernel_eval(spec, float(x))
            rows.append([float(x), kv.value.real, kv.tail_bound])
        return EXIT_OK, {"columns": ["x", "G", "tail_bound"], "rows": rows}
    if what == "matrix":
        rng = settings["range"]
        rep = build_truncated(spec, *(int(v) for v in rng)) if rng else build_truncated(spec)
        return EXIT_OK, {"truncation": rep_header(rep), "columns": ["matrix", "row", "col", "value"],
                         "rows": [list(e) for e in rep_entries(rep)]}
    if what not in ("density", "atoms"):
        raise ConfigError(f"unknown sample kind {what!r} (density, kernel, atoms, matrix)")
    w = closed_form_weight(spec)
    if w.kind == "NonExistent":
        raise NonExistentWeight(w.reason)
    if what == "atoms":
        if w.kind != "AtomicMeasure":
            raise ConfigError(f"{spec.family} has a {w.kind} weight, not atoms; use --what density")
        atoms = w.atoms(settings["points"] or 20)
        return EXIT_OK, {"columns": ["location", "mass"], "rows": [list(a) for a in atoms]}
    if w.kind == "AtomicMeasure":
        raise ConfigError(f"{spec.family} has an atomic measure; request the atoms table with --what atoms")
    if w.kind != "Density" or (w.log_evaluator is None and w.evaluator is None):
        raise ConfigError(f"{w.label}: no pointwise density available")
    xs = _sample_grid(settings, 1e-3 * w.scale, 1e2 * w.scale, log=True)
    vals = np.atleast_1d(w(xs))
    return EXIT_OK, {"columns": ["x", "F"], "rows": [[float(x), float(v)] for x, v in zip(xs, vals)]}


COMMANDS = {"classify": cmd_classify, "verify": cmd_verify, "sample": cmd_sample}


# ---------------------------------------------------------------- output


def render(command: str, hdr: dict, result: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps({"header": hdr, **result}) + "\n"
    lines = ["# " + line for line in dumps(hdr).splitlines()]
    if command == "verify":
        body = rows_to_csv(["check", "passed", "value", "tol"],
                           [(c["name"], c["passed"], c["value"], c["tol"]) for c in result["checks"]])
    elif command == "classify":
        flat = {k: v for k, v in result.items() if not isinstance(v, (dict, list))}
        flat.update({f"limit_{k}": v for k, v in result["limits"].items()})
        body = rows_to_csv(["key", "value"], sorted(flat.items()))
    else:
        body = rows_to_csv(result["columns"], result["rows"])
    return "\n".join(lines) + "\n" + body


def write_output(text: str, out: str | None, command: str, fmt: str, result: dict) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if out.endswith("/") or path.is_dir():
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{command}.{fmt}").write_text(text)
        if "moments" in result:
            rows = result["moments"]["rows"]
            (path / "moments.csv").write_text(rows_to_csv(
                ["n", "target", "computed", "rel_error", "method"],
                [(r["n"], r["target"], r["computed"], r["rel_error"], result["moments"]["method"]) for r in rows],
            ))
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bargmann", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("classify", "spectrum type and coherent-state domain"),
        ("verify", "algebra, coherent, kernel, moment and positivity checks"),
        ("sample", "tables of F(x), G(x), atoms or matrix entries"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--family", help="psi family name")
        p.add_argument("--param", action="append", metavar="K=V", help="family parameter (repeatable)")
        p.add_argument("--mu", type=float, help="representation offset")
        p.add_argument("--range", help="a:b (moment n range for verify, x range or n range for sample)")
        p.add_argument("--tol", type=float, help="moment tolerance for verify")
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--out", help="output file, or a directory for per-check files")
        if name == "sample":
            p.add_argument("--what", choices=["density", "kernel", "atoms", "matrix"])
            p.add_argument("--points", type=int, help="grid size or number of atoms")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command != "sample":
        args.what = args.points = None
    try:
        spec, settings = resolve(args)
        code, result = COMMANDS[args.command](spec, settings)
    except (ConfigError, ParameterError, DomainError, UnsupportedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnclassifiableError as exc:
        print(f"unclassifiable: {exc}", file=sys.stderr)
        return EXIT_UNCLASSIFIABLE
    except NonExistentWeight as exc:
        print(f"no weight exists: {exc}", file=sys.stderr)
        return EXIT_NONEXISTENT
    except Exception as exc:  # the exit-code contract covers every outcome
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.command == "verify":
        for c in result["checks"]:
            print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']} value={c['value']:.3g} tol={c['tol']:g}",
                  file=sys.stderr)
        if code == EXIT_NONEXISTENT:
            print(f"no weight exists: {result['weight']['reason']}", file=sys.stderr)
    text = render(args.command, header(args.command, spec, settings), result, settings["format"])
    write_output(text, settings["out"], args.command, settings["format"], result)
    return code


if __name__ == "__main__":
    sys.exit(main())
