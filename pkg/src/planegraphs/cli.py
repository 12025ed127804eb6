"""Command-line entry point.

    planegraphs gen double-chain --n 10 --k 0 --out d10.json
    planegraphs count d10.json --class spanning-cycle
    planegraphs extremal pts.json --class matching --objective max --crossings forbidden
    planegraphs tour pts.json --objective longest
    planegraphs bound st --order 2 --restarts 8 --seed 0
    planegraphs bound --reproduce-tables --format csv
    planegraphs verify --suite paper-constants

Reports are JSON with sorted keys and carry the run configuration and the
package version.  Exit codes: 0 ok, 1 failed verification, 2 bad input,
3 enumeration limit exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath

from . import __version__, bounds
from .constructions import (
    ChainSpec,
    almost_convex_chain,
    convex_polygon,
    deltoid_tour_gadget,
    generalized_double_chain,
    hexagon_tour_gadget,
    matching_spokes,
    perturbed_convex_polygon,
    random_point_set,
    rotated_triangle_gadget,
    s4_matching_gadget,
)
from .enumeration import GraphClass, LimitExceeded, count, crossing_table, enumerate_masks
from .geometry import PointSet

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3

GEN_KINDS = ("convex", "polygon", "chain", "double-chain", "s4-matching", "deltoid", "hexagon", "spokes",
             "triangles", "random", "random-convex")


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    limit: int | None = None
    workers: int = 1
    seed: int | None = None
    restarts: int | None = None
    tol: float | None = None
    out: str | None = None
    format: str = "json"


class InputError(ValueError):
    pass


def _frac(text):
    return None if text is None else Fraction(text)


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InputError(f"--{name.replace('_', '-')} is required here")


def build_pointset(args) -> PointSet:
    kind = args.kind
    if kind == "convex":
        _need(args, "n")
        return PointSet.convex(args.n)
    if kind == "polygon":
        _need(args, "n")
        return convex_polygon(args.n)
    if kind in ("chain", "double-chain"):
        k = args.k or 0
        if args.r is None:
            _need(args, "n")
            per_chain = args.n // 2 if kind == "double-chain" else args.n
            if kind == "double-chain" and args.n % 2:
                raise InputError("a double chain needs even n")
            if (per_chain - 1) % (k + 1):
                raise InputError(f"n={args.n} does not fit reflex chains of length {k}")
            r = (per_chain - 1) // (k + 1)
        else:
            r = args.r
        spec = ChainSpec(r, k, _frac(args.flatness))
        return almost_convex_chain(spec) if kind == "chain" else generalized_double_chain(spec)
    if kind == "s4-matching":
        _need(args, "n")
        return s4_matching_gadget(args.n)
    if kind in ("deltoid", "hexagon", "spokes"):
        _need(args, "k")
        fn = {"deltoid": deltoid_tour_gadget, "hexagon": hexagon_tour_gadget, "spokes": matching_spokes}[kind]
        return fn(args.k, _frac(args.delta))
    if kind == "triangles":
        _need(args, "n")
        return rotated_triangle_gadget(args.n, _frac(args.eps))
    if kind == "random":
        _need(args, "n")
        return random_point_set(args.n, random.Random(args.seed or 0), args.grid)
    if kind == "random-convex":
        _need(args, "n")
        return perturbed_convex_polygon(args.n, random.Random(args.seed or 0))
    raise InputError(f"unknown kind {kind!r}")


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    return str(v)


def load_pointset(path: str) -> PointSet:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not JSON: {exc}") from exc
    try:
        return PointSet.from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path} is not a point set: {exc}") from exc


def _report(cfg: RunConfig, result) -> dict:
    return {"version": __version__, "config": _plain(asdict(cfg)), "result": result}


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_gen(args, cfg) -> int:
    ps = build_pointset(args)
    doc = ps.to_json()
    doc["meta"] = _plain(ps.meta)
    doc["version"] = __version__
    doc["config"] = _plain(asdict(cfg))
    _emit(_dump(doc), args.out)
    return EXIT_OK


def cmd_count(args, cfg) -> int:
    ps = load_pointset(args.pointset)
    n = count(ps, args.graph_class, crossing_ok=args.crossings == "allowed", limit=args.limit, workers=args.workers)
    _emit(_dump(_report(cfg, {"class": GraphClass.parse(args.graph_class).value, "n": ps.n, "count": n})), args.out)
    return EXIT_OK


def cmd_enumerate(args, cfg) -> int:
    ps = load_pointset(args.pointset)
    table = crossing_table(ps)
    lines = []
    for mask in enumerate_masks(ps, args.graph_class, crossing_ok=args.crossings == "allowed", limit=args.limit):
        edges = [list(table.edges[b]) for b in range(len(table.edges)) if mask >> b & 1]
        lines.append(json.dumps(edges))
    body = "".join(line + "\n" for line in lines)
    if args.out:
        _emit(body, args.out)
        sys.stdout.write(_dump(_report(cfg, {"count": len(lines), "written": args.out})))
    else:
        sys.stdout.write(body)
    return EXIT_OK


def cmd_extremal(args, cfg) -> int:
    from .weighted import WeightModel, extremal_multiplicity

    ps = load_pointset(args.pointset)
    model = WeightModel(ps, digits=args.digits, theta=args.theta)
    rep = extremal_multiplicity(ps, args.graph_class, args.objective, args.crossings, model=model,
                                witnesses=args.witnesses, limit=args.limit, workers=args.workers)
    _emit(_dump(_report(cfg, rep.to_json())), args.out)
    return EXIT_OK


def cmd_tour(args, cfg) -> int:
    from .convex_tour import convex_tour_candidates, longest_convex_tours, shortest_convex_tour

    ps = load_pointset(args.pointset)
    if args.objective == "shortest":
        result = {"tours": [shortest_convex_tour(ps).to_json()]}
    else:
        tours = longest_convex_tours(ps)
        result = {"tours": [t.to_json() for t in tours], "multiplicity": len(tours)}
        if ps.n % 2 == 0:
            result["candidates"] = [t.to_json() for t in convex_tour_candidates(ps)]
    _emit(_dump(_report(cfg, result)), args.out)
    return EXIT_OK


def cmd_bound(args, cfg) -> int:
    if args.reproduce_tables:
        rows = bounds.reproduce_tables(restarts=args.restarts, seed=args.seed)
        if args.format == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=["objective", "order", "published_params", "optimised", "published"],
                               lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: ("" if v is None else (f"{v:.6f}" if isinstance(v, float) else v)) for k, v in r.items()})
            _emit(buf.getvalue(), args.out)
        else:
            _emit(_dump(_report(cfg, rows)), args.out)
        return EXIT_OK
    if args.objective is None:
        raise InputError("name an objective or pass --reproduce-tables")
    if args.objective == "dc":
        dc = bounds.dc_upper_bound()
        result = {"objective": "dc", "base": dc.base, "reported": dc.reported, "checks": dc.checks}
    elif args.objective == "sc":
        sc = bounds.sc_upper_minimize(tol=args.tol)
        result = {"objective": "sc", "a": sc.a, "rate": sc.rate, "factor": sc.factor, "base": sc.base}
    else:
        _need(args, "order")
        result = bounds.optimize(args.objective, args.order, restarts=args.restarts, tol=args.tol,
                                 seed=args.seed).to_json()
    _emit(_dump(_report(cfg, result)), args.out)
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    from .acceptance import run_suite

    checks = run_suite(args.suite)
    for c in checks:
        print(c.line(), file=sys.stderr)
    failed = [c for c in checks if not c.passed]
    result = {"suite": args.suite, "passed": len(checks) - len(failed), "failed": len(failed),
              "checks": [c.to_json() for c in checks]}
    _emit(_dump(_report(cfg, result)), args.out)
    return EXIT_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv", "jsonl"], default="json")
    common.add_argument("--workers", type=int, default=1, help="processes for sharded search")
    common.add_argument("--limit", type=int, help="override the enumeration size cap")

    p = argparse.ArgumentParser(prog="planegraphs", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="build a point set")
    g.add_argument("kind", choices=GEN_KINDS)
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--grid", type=int, default=1000)
    g.add_argument("--delta", help="gadget size as p/q")
    g.add_argument("--eps", help="triangle size as p/q")
    g.add_argument("--flatness", help="reflex chain depth as p/q")
    g.set_defaults(func=cmd_gen)

    def graph_cmd(name, func, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("pointset")
        s.add_argument("--class", dest="graph_class", required=True, type=GraphClass.parse)
        s.add_argument("--crossings", choices=["allowed", "forbidden"], default="forbidden")
        s.set_defaults(func=func)
        return s

    graph_cmd("count", cmd_count, "count graphs of a class")
    graph_cmd("enumerate", cmd_enumerate, "list graphs of a class as JSON lines")
    e = graph_cmd("extremal", cmd_extremal, "multiplicity of the longest or shortest graphs")
    e.add_argument("--objective", choices=["max", "min"], default="max")
    e.add_argument("--witnesses", type=int, default=16)
    e.add_argument("--digits", type=int, default=50)
    e.add_argument("--theta", default="1e-30")

    t = sub.add_parser("tour", parents=[common], help="longest or shortest tour on convex points")
    t.add_argument("pointset")
    t.add_argument("--objective", choices=["longest", "shortest"], default="longest")
    t.set_defaults(func=cmd_tour)

    b = sub.add_parser("bound", parents=[common], help="optimise a growth-rate objective")
    b.add_argument("objective", nargs="?", choices=["tri", "st", "cf", "sc", "dc"])
    b.add_argument("--order", type=int, help="k for tri, z for st/cf")
    b.add_argument("--restarts", type=int, default=8)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--tol", type=float, default=1e-10)
    b.add_argument("--reproduce-tables", action="store_true")
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    v.add_argument("--suite", default="all", choices=["all", "counts", "paper-constants", "weighted"])
    v.set_defaults(func=cmd_verify)
    return p


def _config(args) -> RunConfig:
    skip = {"func", "command", "pointset", "out", "format", "workers", "limit", "seed", "restarts", "tol"}
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return RunConfig(
        command=args.command,
        inputs=[args.pointset] if getattr(args, "pointset", None) else [],
        options=opts,
        limit=args.limit,
        workers=args.workers,
        seed=getattr(args, "seed", None),
        restarts=getattr(args, "restarts", None),
        tol=getattr(args, "tol", None),
        out=args.out,
        format=args.format,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args, _config(args))
    except LimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
