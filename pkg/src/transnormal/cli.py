"""Command-line front end.

Exit codes: 0 success / equivalent, 1 inequivalent or failed check,
2 undecided, 64 malformed input or usage, 65 invalid descriptor.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import classifier as cl
from . import metrics as mt
from . import tables
from .documents import DocumentError, dumps, loads_descriptor, report_to_doc, to_jsonable

EX_OK, EX_NO, EX_UNDECIDED, EX_USAGE, EX_DATAERR = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(path, f"cannot read file ({exc.strerror})") from None
    try:
        return loads_descriptor(text)
    except DocumentError as exc:
        raise DocumentError(f"{path}:{exc.path}", exc.message) from None


def _load(path: str):
    d = _parse(path)
    violations = cl.validate_descriptor(d)
    if violations:
        raise cl.InvalidDescriptor(violations)
    return d


def _bool(x) -> str:
    return "null" if x is None else str(x).lower()


def cmd_classify(args, out):
    d = _load(args.file)
    out.write(dumps(report_to_doc(cl.classify(d), d)))
    return EX_OK


def cmd_equiv(args, out):
    d1, d2 = _load(args.file1), _load(args.file2)
    r = cl.equivalent(d1, d2, bound=args.bound)
    if isinstance(r, cl.Undecided):
        out.write(f"undecided: {r.reason}\n")
        return EX_UNDECIDED
    out.write("equivalent\n" if r else "inequivalent\n")
    return EX_OK if r else EX_NO


def cmd_ambient(args, out):
    out.write(f"{cl.ambient_manifold(_load(args.file))}\n")
    return EX_OK


def cmd_cpc(args, out):
    s = cl.cpc_status(_load(args.file))
    out.write(f"admissible: {_bool(s.admissible)}, geometry: {s.geometry}\n")
    return EX_OK


def cmd_cover(args, out):
    c = cl.essential_cover(_load(args.file))
    out.write(f"cover: {c.cover}\ncover_type: {c.cover_type}\ndeck_generators:\n")
    if not c.deck_generators:
        out.write("  (none)\n")
    for g in c.deck_generators:
        m = json.dumps(to_jsonable(g.surface_map), sort_keys=True)
        out.write(f"  - {g}  surface_map: {m}\n")
    return EX_OK


def cmd_tables(args, out):
    out.write(tables.render(tables.emit_tables(), args.format))
    return EX_OK


def cmd_validate(args, out):
    violations = cl.validate_descriptor(_parse(args.file))
    if not violations:
        out.write("valid\n")
        return EX_OK
    for v in violations:
        out.write(f"violation: {v}\n")
    return EX_DATAERR


def _metric_checks(args):
    """(chart, expected curvature pair or None, deck map, first-return offset)."""
    fam = args.family
    if fam == "nil":
        return mt.NilChart(), (0.5, -0.5), None
    if fam == "sol":
        if args.trace is not None:
            if args.trace <= 2:
                raise UsageError("--trace must be an integer > 2")
            chart = mt.sol_from_trace(args.trace)
        else:
            lam = args.lam if args.lam is not None else (3 + math.sqrt(5)) / 2
            if lam <= 1:
                raise UsageError("--lambda must exceed 1")
            chart = mt.SolChart(lam)
        return chart, (1.0, -1.0), None
    if fam == "flat":
        if not 0 <= args.c < 1:
            raise UsageError("--c must lie in [0, 1)")
        return mt.FlatLatticeChart(args.c), (0.0, 0.0), (0.0, args.c)
    if fam == "product":
        return mt.ProductChart(), (0.0, 0.0), (0.0, 0.0)
    return mt.WarpedChart(), None, (0.0, 0.0)


def cmd_verify_metric(args, out):
    chart, pair, offset = _metric_checks(args)
    tol = args.tol
    results = []
    ok, reports = mt.verify_cpc(chart, tolerance=tol, grid=args.grid)
    worst = max(r.deviation for r in reports)
    results.append(("constant principal curvatures", ok, f"max deviation {worst:.3e}"))
    if pair is not None:
        dev = max(r.deviation_from(pair) for r in reports)
        results.append((f"curvature pair {pair}", dev <= tol, f"max deviation {dev:.3e}"))
    else:
        gap = max(float(abs(r.kappa[..., 0] - r.kappa[..., 1]).max()) for r in reports)
        results.append(("umbilic foils", gap <= tol, f"max kappa1 - kappa2 {gap:.3e}"))
    iso = mt.verify_isometry(chart, chart.deck, tolerance=max(tol, 1e-12))
    results.append(("deck map is an isometry", iso, str(chart.deck)))
    start = (0.125, 0.375)
    try:
        fr = mt.geodesic_first_return(chart, start, tolerance=max(tol, 1e-12))
        detail = f"return point {fr.return_point}, time {fr.return_time:.12g}, drift {fr.max_energy_drift:.1e}"
        good = True
        if offset is not None:
            got = [(fr.return_point[i] - start[i]) % 1.0 for i in range(2)]
            err = max(min(abs(g - o), 1 - abs(g - o)) for g, o in zip(got, offset))
            good = err <= max(tol, 1e-6)
            detail += f", offset error {err:.1e}"
        results.append(("normal geodesic first return", good, detail))
    except mt.GeodesicStepError as exc:
        results.append(("normal geodesic first return", False, str(exc)))
    out.write(f"family: {args.family}\n")
    for name, passed, detail in results:
        out.write(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}\n")
    return EX_OK if all(p for _, p, _ in results) else EX_NO


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="transnormal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def one(name, fn, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("file")
        s.set_defaults(func=fn)
        return s

    one("classify", cmd_classify, "full classification report (JSON)")
    one("ambient", cmd_ambient, "ambient manifold")
    one("cpc", cmd_cpc, "CPC admissibility and geometry")
    one("cover", cmd_cover, "essential cover")
    one("validate", cmd_validate, "list descriptor violations")
    e = sub.add_parser("equiv", help="decide equivalence of two descriptors")
    e.add_argument("file1")
    e.add_argument("file2")
    e.add_argument("--bound", type=int, default=5, help="conjugator entry bound for torus involution pairs")
    e.set_defaults(func=cmd_equiv)
    t = sub.add_parser("tables", help="regenerate the summary tables")
    t.add_argument("--format", choices=("md", "csv"), default="md")
    t.set_defaults(func=cmd_tables)
    v = sub.add_parser("verify-metric", help="numerically certify a metric family")
    v.add_argument("--family", required=True, choices=("nil", "sol", "flat", "product", "warped"))
    v.add_argument("--lambda", dest="lam", type=float)
    v.add_argument("--trace", type=int)
    v.add_argument("--c", type=float, default=0.0)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--grid", type=int, default=mt.DEFAULT_GRID)
    v.set_defaults(func=cmd_verify_metric)
    return p


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EX_USAGE
    except DocumentError as exc:
        err.write(f"parse error: {exc}\n")
        return EX_USAGE
    except cl.InvalidDescriptor as exc:
        for v in exc.violations:
            err.write(f"violation: {v}\n")
        return EX_DATAERR
    except (ValueError, ArithmeticError) as exc:
        err.write(f"precondition failed: {exc}\n")
        return EX_DATAERR


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
