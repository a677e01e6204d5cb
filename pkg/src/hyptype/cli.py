"""Command line interface: ``hyptype <subcommand> ...`` (or ``python -m hyptype``).

Exit codes: 0 success, 1 a check failed, 2 bad usage or invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import constants, harness
from .density import DensityKind, SamplingBudget, eval_density
from .geodesic import GraphParams, MetricKind, distance
from .geometry import DomainError, domain_from_json
from .qcmaps import check_qc1, check_qc2, dilatation, map_from_json, map_to_json, qc1_constant

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load_json(text: str):
    """Inline JSON, or a path to a JSON file."""
    s = text.strip()
    if not s.startswith(("{", "[")):
        try:
            s = Path(text).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {text!r}: {exc.strerror}") from None
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from None


def _point(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise UsageError(f"expected comma-separated coordinates, got {text!r}") from None


def _floats(text: str) -> list[float]:
    return _point(text).tolist()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _csv_records(records: list[dict]) -> str:
    buf = io.StringIO()
    keys = list(dict.fromkeys(k for r in records for k in r))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in records:
        row = [r.get(k, "") for k in keys]
        w.writerow([json.dumps(_jsonable(v)) if isinstance(v, (list, dict, np.ndarray)) else v for v in row])
    return buf.getvalue()


def _emit(args, records, default="json"):
    if args.quiet:
        return
    fmt = args.output or default
    if isinstance(records, str):
        sys.stdout.write(records)
        return
    if fmt == "csv":
        sys.stdout.write(_csv_records(records if isinstance(records, list) else [records]))
    else:
        sys.stdout.write(json.dumps(_jsonable(records), indent=2) + "\n")


# --- subcommands ------------------------------------------------------------------


def cmd_density(args) -> int:
    D = domain_from_json(_load_json(args.domain))
    budget = SamplingBudget(samples=args.budget, seed=args.seed)
    v = eval_density(D, _point(args.point), DensityKind.parse(args.kind), budget)
    _emit(args, {
        "value": v.value,
        "reciprocal": v.reciprocal,
        "witness_a": v.witness_a,
        "witness_b": v.witness_b,
        "exceptional": v.exceptional_midpoint,
    })
    return EXIT_OK


def _graph_params(args) -> GraphParams:
    kw = dict(refinements=args.refinements, quad_order=args.quad_order, seed=args.seed)
    if args.h is not None:
        kw["h"] = args.h
    if args.h_rel is not None:
        kw["h_rel"] = args.h_rel
    return GraphParams(**kw)


def cmd_distance(args) -> int:
    D = domain_from_json(_load_json(args.domain))
    r = distance(D, _point(args.from_), _point(args.to), MetricKind.parse(args.kind), _graph_params(args))
    _emit(args, {"value": r.value, "path": r.path, "refinement_level": r.refinement_level, "kind": r.kind.value})
    return EXIT_OK


def cmd_qc(args) -> int:
    D = domain_from_json(_load_json(args.domain))
    f = map_from_json(_load_json(args.map))
    dil = dilatation(f, D.dim)
    rec = {"map": map_to_json(f), "K_O": dil.K_O, "K_I": dil.K_I, "K": dil.K, "alpha": dil.alpha}
    if args.point is not None:
        ratio = check_qc1(f, D, _point(args.point), SamplingBudget(seed=args.seed))
        C1 = qc1_constant(f, D.dim)
        ok = 1 / C1 <= ratio <= C1
        rec.update(ratio=ratio, C1=C1, within_bound=ok)
        _emit(args, rec)
        return EXIT_OK if ok else EXIT_FAIL
    if args.from_ is None or args.to is None:
        raise UsageError("qc needs --point, or both --from and --to")
    lhs, rhs = check_qc2(f, D, _point(args.from_), _point(args.to), _graph_params(args))
    rec.update(lhs=lhs, rhs_budget=rhs, ratio=lhs / rhs if rhs > 0 else None)
    _emit(args, rec)
    return EXIT_OK


def cmd_roots(args) -> int:
    out = {}
    for name, fn in (("t0", constants.solve_t0), ("log_reciprocal", constants.solve_log_reciprocal),
                     ("midpoint_eq", constants.solve_midpoint_eq)):
        r = fn()
        out[name] = {"value": r.value, "residual": r.residual, "iterations": r.iterations}
    out["k"] = {"value": constants.bp_constant_k(), "residual": 0.0}
    for name, v in constants.lemma2_anchors().items():
        out.setdefault(name, {"value": v, "residual": 0.0})
    out["C0"] = {"value": constants.C0, "residual": 0.0}
    if args.output == "csv":
        _emit(args, [{"name": k, **v} for k, v in out.items()])
    else:
        _emit(args, out)
    return EXIT_OK


def cmd_field(args) -> int:
    D = domain_from_json(_load_json(args.domain))
    lower, upper = _floats(args.lower), _floats(args.upper)
    counts = [int(c) for c in _floats(args.counts)]
    if len(counts) == 1:
        counts = counts * len(lower)
    grid = harness.GridSpec(lower, upper, counts)
    try:
        rows = harness.field(D, DensityKind.parse(args.kind), grid, SamplingBudget(samples=args.budget, seed=args.seed))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if (args.output or "csv") == "csv":
        _emit(args, harness.field_csv(rows))
    else:
        _emit(args, rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.suite or list(harness.SUITES)
    for n in names:
        if n not in harness.SUITES:
            raise UsageError(f"unknown suite {n!r}; choose from {', '.join(harness.SUITES)}")
    reports = [harness.run_suite(n, args.seed) for n in names]
    dicts = [r.to_dict() for r in reports]
    if args.output == "csv":
        _emit(args, [{"suite": d["suite"], "passed": d["passed"], "cases": d["cases"], "failures": len(d["failures"])} for d in dicts])
    else:
        _emit(args, dicts)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# --- parser ---------------------------------------------------------------------------


def _add_graph_args(p):
    p.add_argument("--h", type=float, default=None, help="lattice spacing")
    p.add_argument("--h-rel", type=float, default=None, help="spacing relative to the bounding radius")
    p.add_argument("--refinements", type=int, default=0)
    p.add_argument("--quad-order", type=int, default=16)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--output", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="hyptype", description="Hyperbolic-type densities, path distances and checks.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", choices=("json", "csv"), default=None)
    p.add_argument("--quiet", action="store_true", default=False)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("density", parents=[common], help="one density value with its witness pair")
    s.add_argument("--domain", required=True, help="JSON file or inline JSON")
    s.add_argument("--point", required=True, help="comma-separated coordinates")
    s.add_argument("--kind", default="lambda", choices=[k.value for k in DensityKind])
    s.add_argument("--budget", type=int, default=SamplingBudget().samples, help="angles per circle scan")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("distance", parents=[common], help="graph upper bound for a path distance")
    s.add_argument("--domain", required=True)
    s.add_argument("--from", dest="from_", required=True)
    s.add_argument("--to", required=True)
    s.add_argument("--kind", default="d", choices=[k.value for k in MetricKind])
    _add_graph_args(s)
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("qc", parents=[common], help="distortion checks for an explicit map")
    s.add_argument("--map", required=True)
    s.add_argument("--domain", required=True)
    s.add_argument("--point")
    s.add_argument("--from", dest="from_")
    s.add_argument("--to")
    _add_graph_args(s)
    s.set_defaults(func=cmd_qc)

    s = sub.add_parser("roots", parents=[common], help="numerical constants with residuals")
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("field", parents=[common], help="density values on a grid (CSV by default)")
    s.add_argument("--domain", required=True)
    s.add_argument("--kind", default="lambda", choices=[k.value for k in DensityKind])
    s.add_argument("--lower", required=True, help="comma-separated lower corner")
    s.add_argument("--upper", required=True, help="comma-separated upper corner")
    s.add_argument("--counts", required=True, help="points per axis (one value or one per axis)")
    s.add_argument("--budget", type=int, default=256)
    s.set_defaults(func=cmd_field)

    s = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    s.add_argument("--suite", action="append", help="suite name (repeatable); default: all")
    s.set_defaults(func=cmd_verify)
    return p


_COORD_FLAGS = ("--point", "--from", "--to", "--lower", "--upper")


def _glue_negative(argv):
    # argparse reads "-1,-1" as an option, so attach such values with "="
    out, it = [], iter(argv)
    for tok in it:
        if tok in _COORD_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt[:1] == "-" and nxt[1:2] in set("0123456789."):
                out.append(f"{tok}={nxt}")
            else:
                out += [tok, nxt]
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_negative(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, DomainError, ValueError, KeyError, TypeError) as exc:
        if not args.quiet:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
