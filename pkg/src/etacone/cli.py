"""Command-line front end.

Subcommands: verify, classify, min-eta, solve, trace, export-fixture.  The
SOURCE argument is a fixture name (tried first) or a distance-table path.

Exit codes: 0 success, 1 axiom violation, 2 usage/parse error,
3 precondition failed, 4 max_iter or cycle.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .errors import ContractViolation, EtaConeError, InconsistentDataError
from .fixed_point import (SelfMap, estimate_contraction, partial_sums, picard_orbit, solve_banach,
                          solve_banach_iterate_power, solve_hardy_rogers, solve_strict_compact)
from .fixtures import FIXTURE_NAMES, FixtureEntry, fixture
from .space import SamplingPlan, _label, check_axioms, classify, derive_eta_metric, minimal_eta
from .tableio import format_table, load_table, parse_map

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_PRECONDITION, EXIT_BUDGET = 0, 1, 2, 3, 4
STATUS_EXIT = {"converged": EXIT_OK, "precondition_failed": EXIT_PRECONDITION,
               "max_iter": EXIT_BUDGET, "cycle_detected": EXIT_BUDGET}


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-10
    max_iter: int = 10000
    tail_window: int = 16
    seed: int = 0
    output: str = "human"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ContractViolation("--tol must be positive")
        if self.max_iter < 1:
            raise ContractViolation("--max-iter must be >= 1")
        if self.tail_window < 2:
            raise ContractViolation("--tail-window must be >= 2")
        if self.output not in ("human", "json", "csv"):
            raise ContractViolation(f"unknown format {self.output!r}")

    @property
    def sampling(self) -> SamplingPlan:
        return SamplingPlan(seed=self.seed)


class UsageError(EtaConeError):
    pass


# ------------------------------------------------------------ plumbing ---

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)


def _num(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _parse_params(items: List[str]) -> dict:
    params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    return params


def _build_fixture(name: str, params: dict) -> FixtureEntry:
    try:
        return fixture(name, **params)
    except TypeError as exc:
        raise UsageError(f"bad fixture parameter: {exc}") from None


def _load_source(source: str, params: dict) -> FixtureEntry:
    if source in FIXTURE_NAMES:
        return _build_fixture(source, params)
    path = Path(source)
    if not path.is_file():
        raise UsageError(f"{source!r} is neither a fixture ({', '.join(FIXTURE_NAMES)}) nor a readable file")
    space = load_table(path)
    return FixtureEntry(path.stem, space)


def _resolve_point(space, text: str):
    if not space.points.is_finite:
        try:
            return float(text)
        except ValueError:
            for s in space.points.sentinels:
                if str(s) == text:
                    return s
            raise UsageError(f"{text!r} is not a point of the interval") from None
    for p in space.points.points:
        if str(p) == text or str(_label(p)) == text:
            return p
    try:
        value = float(text)
    except ValueError:
        value = None
    for p in space.points.points:
        if value is not None and isinstance(p, (int, float)) and p == value:
            return p
    raise UsageError(f"{text!r} is not a point of the space")


def _builtin_map(spec: str, entry: FixtureEntry) -> Optional[SelfMap]:
    tokens = spec.split()
    if not tokens:
        return None
    domain = entry.space.points
    try:
        args = [float(t) for t in tokens[1:]]
    except ValueError:
        return None
    name = tokens[0]
    if name == "half" and not args:
        return SelfMap(domain, lambda x: x / 2, "half")
    if name == "square" and not args:
        return SelfMap(domain, lambda x: x * x, "square")
    if name == "identity" and not args:
        return SelfMap(domain, lambda x: x, "identity")
    if name == "affine" and len(args) == 2:
        a, b = args
        return SelfMap(domain, lambda x: a * x + b, f"affine {a:g} {b:g}")
    if name == "const" and len(args) == 1:
        c = args[0]
        if domain.is_finite:
            target = _resolve_point(entry.space, tokens[1])
            return SelfMap(domain, lambda x: target, f"const {tokens[1]}")
        return SelfMap(domain, lambda x: c, f"const {c:g}")
    return None


def _resolve_map(entry: FixtureEntry, spec: Optional[str]) -> SelfMap:
    if spec is None:
        if entry.map is None:
            raise UsageError(f"{entry.name} has no built-in map; pass --map")
        return entry.map
    builtin = _builtin_map(spec, entry)
    if builtin is not None:
        return builtin
    path = Path(spec)
    if path.is_file():
        if not entry.space.points.is_finite:
            raise UsageError("map files apply to finite spaces only")
        pts = list(entry.space.points.points)
        labels = [str(_label(p)) for p in pts]
        table = parse_map(path.read_text(), labels)
        by_label = dict(zip(labels, pts))
        mapping = {by_label[k]: by_label[v] for k, v in table.items()}
        return SelfMap.from_table(mapping, entry.space.points, f"table {path.name}")
    raise UsageError(f"unknown map {spec!r}; use half, square, identity, 'affine a b', 'const c' or a map file")


def _config(args) -> RunConfig:
    return RunConfig(args.tol, args.max_iter, args.tail_window, args.seed, args.format)


# ------------------------------------------------------------ commands ---

def cmd_verify(args, out) -> int:
    cfg = _config(args)
    entry = _load_source(args.source, _parse_params(args.param))
    tol = args.check_tol
    report = check_axioms(entry.space, tol, cfg.sampling)
    if cfg.output == "json":
        out.write(dump_json(report.to_dict()) + "\n")
    elif cfg.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["axiom", "points", "lhs", "rhs", "slack"])
        for v in report.violations:
            w.writerow([v.axiom, " ".join(map(str, v.points)), " ".join(map(_num, v.lhs)),
                        " ".join(map(_num, v.rhs)), _num(v.slack)])
    else:
        out.write(f"space: {entry.space.name or entry.name}\n")
        out.write(f"checked {report.pairs_checked} pairs, {report.triples_checked} triples"
                  f" ({'exhaustive' if report.exhaustive else 'sampled'}), tol={tol:g}\n")
        for ax, ok in (("d1", report.d1_ok), ("d2", report.d2_ok), ("d3", report.d3_ok)):
            out.write(f"  {ax}: {'pass' if ok else 'FAIL'}\n")
        out.write(f"tolerance consumed: {report.tolerance_consumed:g}\n")
        if report.binding and len(report.binding) <= 90:
            out.write("binding triangle checks d(x,z) <= eta(x,z) [d(x,y) + d(y,z)]:\n")
            for c in report.binding:
                out.write(f"  ({c.x},{c.y},{c.z}): {_vec(c.lhs)} <= {c.eta:g} * ... = {_vec(c.rhs)}"
                          f"  slack {c.slack:g}  {'ok' if c.ok else 'VIOLATED'}\n")
        for v in report.violations[:50]:
            out.write(f"violation {v.axiom} at {tuple(v.points)}: lhs {_vec(v.lhs)} rhs {_vec(v.rhs)}"
                      f" slack {v.slack:.17g}\n")
        if len(report.violations) > 50:
            out.write(f"... {len(report.violations) - 50} more violations\n")
        out.write("result: " + ("PASS" if report.ok else "FAIL") + "\n")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _vec(v) -> str:
    return "(" + ", ".join("%g" % x for x in v) + ")" if len(v) > 1 else "%g" % v[0]


def _distance_view(entry: FixtureEntry, cfg: RunConfig):
    if not entry.space.points.is_finite:
        raise UsageError("classification needs a finite space")
    metric = derive_eta_metric(entry.space, verify=False)
    return metric, list(entry.space.points.points)


def _write_table(out, labels, table, cfg):
    if cfg.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow([""] + [str(_label(p)) for p in labels])
        for p, row in zip(labels, table):
            w.writerow([str(_label(p))] + [_num(float(v)) for v in row])
        return
    width = max(len(str(_label(p))) for p in labels)
    out.write(" " * (width + 1) + " ".join(f"{str(_label(p)):>12}" for p in labels) + "\n")
    for p, row in zip(labels, table):
        out.write(f"{str(_label(p)):>{width}} " + " ".join(f"{v:12.6g}" for v in row) + "\n")


def cmd_classify(args, out) -> int:
    cfg = _config(args)
    entry = _load_source(args.source, _parse_params(args.param))
    metric, labels = _distance_view(entry, cfg)
    result = classify(metric.table(), labels)
    if cfg.output == "json":
        out.write(dump_json(result.to_dict()) + "\n")
        return EXIT_OK
    if cfg.output == "csv":
        _write_table(out, labels, result.eta_min, cfg)
        return EXIT_OK
    if result.is_metric:
        out.write("classification: metric\n")
    else:
        x, y, z = (_label(p) for p in result.witness)
        out.write(f"classification: metric-type L={result.L:.17g}\n")
        out.write(f"not a metric: D({x},{z}) = {result.lhs:.17g} > D({x},{y}) + D({y},{z}) = {result.rhs:.17g}\n")
        out.write(f"witness: ({x}, {y}, {z})\n")
    out.write("minimal eta:\n")
    _write_table(out, labels, result.eta_min, cfg)
    return EXIT_OK


def cmd_min_eta(args, out) -> int:
    cfg = _config(args)
    entry = _load_source(args.source, _parse_params(args.param))
    metric, labels = _distance_view(entry, cfg)
    table = minimal_eta(metric)
    if cfg.output == "json":
        out.write(dump_json({"labels": [_label(p) for p in labels], "eta_min": table}) + "\n")
    else:
        _write_table(out, labels, table, cfg)
    return EXIT_OK


def _solve(entry: FixtureEntry, args, cfg: RunConfig):
    T = _resolve_map(entry, args.map)
    if args.x0 is not None:
        x0 = _resolve_point(entry.space, args.x0)
    elif entry.x0 is not None:
        x0 = entry.x0
    else:
        raise UsageError("pass --x0")
    scheme = args.scheme
    common = dict(tol=cfg.tolerance, max_iter=cfg.max_iter, tail_window=cfg.tail_window,
                  sampling=cfg.sampling)
    if scheme == "banach":
        return solve_banach(entry.space, T, x0, **common)
    if scheme == "power":
        return solve_banach_iterate_power(entry.space, T, args.power, x0, **common)
    if scheme == "strict":
        return solve_strict_compact(entry.space, T, x0)
    coeffs = dict(entry.coefficients)
    for key in ("alpha", "beta", "gamma", "delta"):
        value = getattr(args, key)
        if value is not None:
            coeffs[key] = value
    return solve_hardy_rogers(entry.space, T, x0=x0, **coeffs, **common)


def cmd_solve(args, out) -> int:
    cfg = _config(args)
    entry = _load_source(args.source, _parse_params(args.param))
    report = _solve(entry, args, cfg)
    if cfg.output == "json":
        out.write(dump_json(report.to_dict()) + "\n")
    elif cfg.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["check", "status", "value", "bound", "detail"])
        for c in report.preconditions.values():
            w.writerow([c.name, c.status, _num(c.value), _num(c.bound), c.detail])
    else:
        fp = "none" if report.fixed_point is None else _num(_label(report.fixed_point))
        out.write(f"scheme: {report.scheme}\nstatus: {report.status}\nfixed point: {fp}\n"
                  f"residual D(x*, Tx*): {report.residual:.17g}\niterations: {report.iterations}\n")
        out.write("checks:\n")
        for c in report.preconditions.values():
            out.write(f"  {c.name}: {c.status} (value {c.value:.17g}, bound {c.bound:.17g}) {c.detail}\n")
        for k, v in report.extra.items():
            out.write(f"{k}: {v}\n")
        out.write(report.scope + "\n")
    return STATUS_EXIT[report.status]


def trace_rows(entry: FixtureEntry, T: SelfMap, x0, cfg: RunConfig):
    trace = picard_orbit(entry.space, T, x0, cfg.max_iter, cfg.tolerance, cfg.tail_window)
    m = len(trace.iterates) - 1
    try:
        k = estimate_contraction(entry.space, T, cfg.sampling)
    except EtaConeError:
        k = math.nan
    sums = partial_sums(trace, k, m) if 0 <= k < 1 and m >= 1 else []
    rows = []
    w = cfg.tail_window
    for n, dn in enumerate(trace.step_distances):
        window = trace.iterates[max(0, n - w + 1):n + 1]
        eta_max = max(entry.space.eta(a, b) for a in window for b in window)
        s = sums[n - 1] if 1 <= n <= len(sums) else None
        rows.append({"n": n, "x_n": _label(trace.iterates[n]), "d_n": dn,
                     "eta_tail_max": eta_max, "S_n": s})
    return rows, k


def cmd_trace(args, out) -> int:
    cfg = _config(args)
    entry = _load_source(args.source, _parse_params(args.param))
    T = _resolve_map(entry, args.map)
    x0 = _resolve_point(entry.space, args.x0) if args.x0 is not None else entry.x0
    if x0 is None:
        raise UsageError("pass --x0")
    rows, k = trace_rows(entry, T, x0, cfg)
    if cfg.output == "json":
        out.write(dump_json({"k": k, "rows": rows}) + "\n")
        return EXIT_OK
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "x_n", "d_n", "eta_tail_max", "S_n"])
    for r in rows:
        w.writerow([r["n"], _num(r["x_n"]), _num(r["d_n"]), _num(r["eta_tail_max"]),
                    "" if r["S_n"] is None else _num(r["S_n"])])
    return EXIT_OK


def cmd_export_fixture(args, out) -> int:
    entry = _build_fixture(args.name, _parse_params(args.param))
    text = format_table(entry.space, entry.space.name or entry.name)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


# --------------------------------------------------------------- parser ---

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="solver/check tolerance (1e-10)")
    g.add_argument("--max-iter", type=int, default=argparse.SUPPRESS, help="iteration budget (10000)")
    g.add_argument("--tail-window", type=int, default=argparse.SUPPRESS, help="orbit tail window (16)")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="sampling seed (0)")
    g.add_argument("--format", choices=("human", "json", "csv"), default=argparse.SUPPRESS)
    g.add_argument("--param", action="append", default=argparse.SUPPRESS, metavar="KEY=VALUE",
                   help="fixture parameter, e.g. alpha=1")

    parser = argparse.ArgumentParser(prog="etacone", parents=[common],
                                     description="Eta-cone metric spaces: verify, classify, solve.")
    parser.set_defaults(tol=1e-10, max_iter=10000, tail_window=16, seed=0, format="human", param=[])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check the axioms of a table or fixture")
    p.add_argument("source")
    p.add_argument("--check-tol", type=float, default=1e-9,
                   help="tolerance for the axiom checks (default 1e-9)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[common], help="metric or metric-type, with minimal eta")
    p.add_argument("source")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("min-eta", parents=[common], help="print the minimal eta table")
    p.add_argument("source")
    p.set_defaults(func=cmd_min_eta)

    for name, func in (("solve", cmd_solve), ("trace", cmd_trace)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("source")
        p.add_argument("--map", default=None, help="half | square | identity | 'affine a b' | 'const c' | map file")
        p.add_argument("--x0", default=None)
        if name == "solve":
            p.add_argument("--scheme", choices=("banach", "power", "strict", "hardy-rogers"), default="banach")
            p.add_argument("--power", type=int, default=2)
            for coef in ("alpha", "beta", "gamma", "delta"):
                p.add_argument(f"--{coef}", type=float, default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("export-fixture", parents=[common], help="write a finite fixture as a table")
    p.add_argument("name")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_export_fixture)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args, out)
    except InconsistentDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (EtaConeError, LookupError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
