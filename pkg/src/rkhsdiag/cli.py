"""Command-line front end: ``rkhsdiag {list,verify,fiber,gamma,berezin}``.

Exit codes: 0 pass, 1 residual over tolerance, 2 usage error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .catalog import get_model, list_models, parameter_schema
from .errors import DenominatorUnderflow, NormalizationFailure, QuadratureError, RKHSDiagError
from .fiber import DEFAULT_SEED, Tolerances, commutativity_report, default_xi_grid, default_yv_grid, fiber_report
from .quadrature import QuadSpec
from .spectral import berezin, gamma
from .symbols import SymbolSpec

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ parsing

def _float(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise UsageError(f"not a number: {tok!r}") from None


def parse_points(text: str, n: int = 1) -> list:
    """``"0.5,1,2"``; vector points join components with ``:`` as in ``"1:-0.5,2:0"``."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise UsageError(f"empty entry in {text!r}")
        parts = [_float(p) for p in item.split(":")]
        if len(parts) != n:
            raise UsageError(f"{item!r} needs {n} component(s)")
        out.append(parts[0] if n == 1 else tuple(parts))
    return out


def xi_grid_from_args(model, args) -> list:
    if args.xi_set is not None:
        if any(v is not None for v in (args.xi_min, args.xi_max, args.samples)):
            raise UsageError("--xi-set cannot be combined with --xi-min/--xi-max/--samples")
        return parse_points(args.xi_set, model.n)
    given = [v is not None for v in (args.xi_min, args.xi_max)]
    if not any(given) and args.samples is None:
        return default_xi_grid(model)
    if not all(given):
        raise UsageError("--xi-min and --xi-max go together")
    count = args.samples if args.samples is not None else 5
    if count < 1 or not args.xi_min <= args.xi_max:
        raise UsageError("need --samples >= 1 and --xi-min <= --xi-max")
    xs = np.linspace(args.xi_min, args.xi_max, count)
    if model.group.dual_is_integer:
        xs = sorted({int(round(x)) for x in xs})
    else:
        xs = [float(x) for x in xs]
    # vector frequencies follow the default grid's direction (x, -x/2)
    return xs if model.n == 1 else [(x, -0.5 * x) for x in xs]


def _resolve_model(text: str):
    try:
        return get_model(text)
    except RKHSDiagError as exc:
        raise UsageError(str(exc).strip("'\"")) from None


def _tolerances(args) -> Tolerances:
    if args.tol is None:
        return Tolerances()
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    return Tolerances.uniform(args.tol)


# ------------------------------------------------------------------ output

def _clean(obj):
    """JSON-safe copy: non-finite floats become null, numpy scalars become Python numbers."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(doc) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _g17(x) -> str:
    return format(float(x), ".17g")


def _header(model) -> dict:
    return {"schema_version": SCHEMA_VERSION, "model_id": model.id, "params": dict(model.params)}


# ----------------------------------------------------------------- commands

def cmd_list(args) -> int:
    rows = []
    for family in list_models():
        rows.append({"id": family, "params": parameter_schema(family),
                     "description": get_model(family).description})
    if args.json:
        _emit(dumps(rows), args)
    else:
        lines = []
        for r in rows:
            schema = ",".join(f"{k}={v}" for k, v in sorted(r["params"].items())) or "-"
            lines.append(f"{r['id']:<20} {schema:<20} {r['description']}")
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


def _summary(reports) -> dict:
    worst = 0.0
    for r in reports:
        for val in (r.fourier_residual_max, r.repro_residual_max, r.normalization_residual,
                    abs(r.numeric_dimension - r.declared_dimension)):
            if math.isfinite(val):
                worst = max(worst, val)
    inside = [r.commutative_verdict for r in reports if r.commutative_verdict != "outside-omega"]
    if not inside:
        overall = "outside-omega"
    elif all(v == "commutative" for v in inside):
        overall = "commutative"
    else:
        overall = "non-commutative"
    return {"all_pass": all(r.passed for r in reports), "worst_residual": worst, "verdict": overall}


def _report_exit(reports) -> int:
    if not all(r.converged for r in reports):
        return EXIT_NUMERIC
    return EXIT_OK if all(r.passed for r in reports) else EXIT_RESIDUAL


def _report_document(model, reports, spec, tol, seed) -> dict:
    doc = _header(model)
    doc.update(quad_spec=dataclasses.asdict(spec), tolerances=dataclasses.asdict(tol), seed=seed,
               fiber_reports=[r.to_dict() for r in reports], summary=_summary(reports))
    return doc


def cmd_verify(args) -> int:
    model = _resolve_model(args.model)
    spec, tol = QuadSpec.from_env(), _tolerances(args)
    xs = xi_grid_from_args(model, args)
    grid = default_yv_grid(model, seed=args.seed)
    reports = commutativity_report(model, xs, grid, spec, tol)
    _emit(dumps(_report_document(model, reports, spec, tol, args.seed)), args)
    return _report_exit(reports)


def cmd_fiber(args) -> int:
    model = _resolve_model(args.model)
    spec, tol = QuadSpec.from_env(), _tolerances(args)
    points = parse_points(args.xi, model.n)
    if len(points) != 1:
        raise UsageError("--xi takes a single frequency")
    xi = points[0]
    report = fiber_report(model, xi, default_yv_grid(model, seed=args.seed), spec, tol)
    _emit(dumps(_report_document(model, [report], spec, tol, args.seed)), args)
    return _report_exit([report])


def _symbol(args) -> SymbolSpec:
    try:
        return SymbolSpec.parse(args.symbol)
    except RKHSDiagError as exc:
        raise UsageError(str(exc)) from None


def _point_columns(name, n):
    return [name] if n == 1 else [f"{name}_{i + 1}" for i in range(n)]


def _point_cells(p):
    return [_g17(c) for c in (p if isinstance(p, tuple) else (p,))]


def _csv_text(comment: str, header: list, rows: list) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_gamma(args) -> int:
    model = _resolve_model(args.model)
    psi = _symbol(args)
    spec = QuadSpec.from_env()
    samples = [gamma(model, psi, xi, spec) for xi in xi_grid_from_args(model, args)]
    if args.json:
        doc = _header(model)
        doc.update(command="gamma", symbol=str(psi), quad_spec=dataclasses.asdict(spec),
                   samples=[s.to_dict() for s in samples])
        _emit(dumps(doc), args)
        return EXIT_OK
    d = max((s.value.shape[0] if s.is_matrix else 1) for s in samples) if samples else 1
    cols = _point_columns("xi", model.n)
    if d == 1:
        cols += ["re", "im"]
    else:
        cols += [f"{part}_{j}_{k}" for j in range(1, d + 1) for k in range(1, d + 1) for part in ("re", "im")]
    rows = []
    for s in samples:
        vals = np.atleast_2d(s.value)
        cells = _point_cells(s.xi)
        for z in vals.ravel():
            cells += [_g17(z.real), _g17(z.imag)]
        rows.append(cells)
    _emit(_csv_text(f"gamma model={model.id} symbol={psi} d={d}", cols, rows), args)
    return EXIT_OK


def cmd_berezin(args) -> int:
    model = _resolve_model(args.model)
    psi = _symbol(args)
    spec = QuadSpec.from_env()
    if args.y_set is None:
        lo, hi = model.y_region
        ys = [0.5 * (lo + hi)] if model.n == 1 else [tuple([0.5 * (lo + hi)] * model.n)]
    else:
        ys = parse_points(args.y_set, model.n)
    values = [(y, berezin(model, psi, y, spec)) for y in ys]
    if args.json:
        doc = _header(model)
        doc.update(command="berezin", symbol=str(psi), quad_spec=dataclasses.asdict(spec),
                   samples=[{"y": list(y) if isinstance(y, tuple) else y, "re": v.real, "im": v.imag}
                            for y, v in values])
        _emit(dumps(doc), args)
        return EXIT_OK
    rows = [_point_cells(y) + [_g17(v.real), _g17(v.imag)] for y, v in values]
    _emit(_csv_text(f"berezin model={model.id} symbol={psi}", _point_columns("y", model.n) + ["re", "im"],
                    rows), args)
    return EXIT_OK


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="verdict and residual tolerance (all checks)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for the (y, v) sample grid")
    common.add_argument("--out", help="write output to this path instead of stdout")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output")
    fmt.add_argument("--csv", action="store_true", help="CSV output (default for gamma and berezin)")
    common.add_argument("-v", "--verbose", action="store_true", help="log quadrature warnings")

    freq = argparse.ArgumentParser(add_help=False)
    freq.add_argument("--xi-min", type=float, help="lower end of an evenly spaced frequency range")
    freq.add_argument("--xi-max", type=float, help="upper end of the range")
    freq.add_argument("--samples", type=int, help="number of range points (default 5)")
    freq.add_argument("--xi-set", help="comma-separated frequencies; vector components joined by ':'")

    parser = argparse.ArgumentParser(prog="rkhsdiag", description="Fiber kernels, commutativity checks and "
                                     "spectral functions for translation-invariant kernel models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("list", parents=[common], help="list the model families")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify", parents=[common, freq], help="commutativity report over a frequency grid")
    p.add_argument("model")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fiber", parents=[common], help="report for a single frequency")
    p.add_argument("model")
    p.add_argument("--xi", required=True)
    p.set_defaults(func=cmd_fiber)

    p = sub.add_parser("gamma", parents=[common, freq], help="spectral function of a Toeplitz symbol")
    p.add_argument("model")
    p.add_argument("--symbol", required=True, help="const:c | indicator:a,b | expdecay:alpha | power:p")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("berezin", parents=[common], help="Berezin transform of a Toeplitz symbol")
    p.add_argument("model")
    p.add_argument("--symbol", required=True, help="const:c | indicator:a,b | expdecay:alpha | power:p")
    p.add_argument("--y-set", help="comma-separated heights; vector components joined by ':'")
    p.set_defaults(func=cmd_berezin)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rkhsdiag: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, DenominatorUnderflow, NormalizationFailure) as exc:
        print(f"rkhsdiag: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except RKHSDiagError as exc:
        print(f"rkhsdiag: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
