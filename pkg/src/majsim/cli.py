"""Command-line front end: ``majsim {gen,simulate,exact,mc,sweep,verify}``.

Records go out as line-delimited JSON, tables as CSV. The first line of every
output is a metadata header (tool version, command, seed and a hash of the
configuration); for CSV it is prefixed with ``#``. ``gen`` writes a bare edge
list and sends its header to stderr instead.

Exit codes: 0 success, 1 verification violation, 2 usage or input error,
3 timeout, 4 internal assertion (potential increase, invalid absorbed state).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__
from .dynamics import init_opinions, parse_opinions, run_to_absorption
from .errors import AbsorptionTimeout, MajsimError
from .exact import exact_consensus_probability
from .graph import FAMILIES, GraphSpec, make_graph, to_edge_list
from .montecarlo import ExperimentConfig, estimate, parse_grid, sweep, trial_rng
from .theory import reports_to_csv
from . import verify

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_TIMEOUT, EXIT_ASSERT = 0, 1, 2, 3, 4

_NOT_CONFIG = {"out", "format", "func"}


def _meta(args):
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}
    digest = hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]
    return {"tool": "majsim", "version": __version__, "command": args.command,
            "seed": args.seed, "config_hash": digest, "config": config}


def _dump(obj):
    return json.dumps(obj, sort_keys=True, allow_nan=False)


class _Output:
    def __init__(self, args):
        self.args = args
        self.lines = []

    def header(self):
        meta = _dump({"meta": _meta(self.args)})
        self.lines.append(("# " + meta) if self.args.format == "csv" else meta)

    def record(self, obj):
        self.lines.append(_dump(obj))

    def text(self, text):
        self.lines.append(text.rstrip("\n"))

    def flush(self):
        payload = "\n".join(self.lines) + "\n"
        if self.args.out:
            with open(self.args.out, "w") as fh:
                fh.write(payload)
        else:
            sys.stdout.write(payload)


def _graph_spec(args):
    if args.graph:
        return GraphSpec(path=args.graph)
    if args.family is None or args.n is None:
        raise SystemExit("error: give --graph PATH or --family NAME --n INT")
    return GraphSpec(args.family, args.n, args.extra, args.seed)


def _add_graph_args(p):
    p.add_argument("--graph", metavar="PATH", help="edge-list file")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--extra", type=int, default=0, help="extra edges for --family random")


def _add_common(p, fmt="json"):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("json", "csv"), default=fmt)


def cmd_gen(args):
    family = args.family_pos or args.family
    n = args.n_pos if args.n_pos is not None else args.n
    if family is None or n is None:
        raise SystemExit("error: gen needs a family and a vertex count")
    graph = make_graph(family, n, args.extra, args.seed)
    sys.stderr.write(_dump({"meta": _meta(args)}) + "\n")
    text = to_edge_list(graph)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args):
    graph = _graph_spec(args).build()
    rng = trial_rng(args.seed, 0)
    x0 = parse_opinions(args.init) if args.init else init_opinions(graph.n, args.p, rng)
    out = _Output(args)
    out.header()
    try:
        rec = run_to_absorption(graph, x0, rng, args.max_steps, record=args.trace)
    except AbsorptionTimeout as exc:
        out.record({"timeout": True, **exc.record.to_dict()})
        out.flush()
        sys.stderr.write(f"timeout: {exc}\n")
        return EXIT_TIMEOUT
    out.record(rec.to_dict())
    out.flush()
    return EXIT_OK


def cmd_exact(args):
    graph = _graph_spec(args).build()
    out = _Output(args)
    out.header()
    out.record(exact_consensus_probability(graph, args.p).to_dict())
    out.flush()
    return EXIT_OK


def cmd_mc(args):
    spec = _graph_spec(args)
    cfg = ExperimentConfig(spec, args.p, args.trials, args.seed, args.max_steps,
                           confidence=args.confidence)
    report = estimate(cfg)
    out = _Output(args)
    out.header()
    row = report.to_dict()
    if args.format == "csv":
        out.text(",".join(row))
        out.text(",".join("" if v is None else str(v) for v in row.values()))
    else:
        out.record(row)
    out.flush()
    return EXIT_TIMEOUT if report.timeouts else EXIT_OK


def cmd_sweep(args):
    spec = _graph_spec(args)
    reports = sweep(spec, parse_grid(args.p_grid), args.trials, args.seed,
                    args.max_steps, confidence=args.confidence)
    out = _Output(args)
    out.header()
    if args.format == "csv":
        out.text(reports_to_csv(reports))
    else:
        for r in reports:
            out.record(r.to_dict())
    out.flush()
    return EXIT_TIMEOUT if any(r.timeouts for r in reports) else EXIT_OK


def _suite_items(args):
    ns = verify.parse_range(args.n) if args.n else None
    fams = [args.family] if args.family else None
    if args.suite == "potential":
        return verify.suite_potential(args.family or "random", ns or range(5, 13),
                                      args.trials, args.seed)
    if args.suite == "absorption":
        kw = {"families": fams} if fams else {}
        return verify.suite_absorption(ns=ns or range(4, args.max_n + 1),
                                       trials=args.trials, seed=args.seed, **kw)
    if args.suite == "blocked":
        return verify.suite_blocked(fams or ("cycle", "path"), ns or range(4, 9),
                                    args.steps, args.seed)
    if args.suite == "bound":
        grid = parse_grid(args.p_grid) if args.p_grid else None
        return verify.suite_bound(args.max_n, grid, args.seed)
    return verify.suite_reachability(fams or ("cycle", "path"), ns or range(4, 13))


def cmd_verify(args):
    out = _Output(args)
    out.header()
    checked = violations = 0
    for item in _suite_items(args):
        checked += 1
        violations += not item["ok"]
        out.record({"suite": args.suite, **item})
        if not item["ok"]:
            sys.stderr.write(f"VIOLATION {args.suite}: {_dump(item)}\n")
    out.record({"summary": {"suite": args.suite, "checked": checked,
                            "violations": violations, "ok": violations == 0}})
    out.flush()
    return EXIT_VIOLATION if violations else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="majsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"majsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    p.add_argument("family_pos", nargs="?", choices=FAMILIES, metavar="FAMILY")
    p.add_argument("n_pos", nargs="?", type=int, metavar="N")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--extra", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("simulate", help="run one trajectory to absorption")
    _add_graph_args(p)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--init", help="explicit initial state such as '++--'")
    p.add_argument("--max-steps", type=int)
    p.add_argument("--trace", action="store_true", help="include the potential sequence")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("exact", help="exact consensus probability by enumeration")
    _add_graph_args(p)
    p.add_argument("--p", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_exact)

    for name, fn, fmt in (("mc", cmd_mc, "json"), ("sweep", cmd_sweep, "csv")):
        p = sub.add_parser(name, help="Monte Carlo estimate" if name == "mc"
                           else "Monte Carlo estimates over a grid of p vs the bound")
        _add_graph_args(p)
        if name == "mc":
            p.add_argument("--p", type=float, default=0.5)
        else:
            p.add_argument("--p-grid", default="0.1:0.9:0.1", metavar="START:STOP:STEP")
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--max-steps", type=int)
        p.add_argument("--confidence", type=float, default=0.95)
        _add_common(p, fmt)
        p.set_defaults(func=fn)

    p = sub.add_parser("verify", help="run an invariant battery")
    p.add_argument("suite", choices=verify.SUITES)
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", help="vertex counts: '4..10', '4,6' or '5'")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--p-grid", metavar="START:STOP:STEP")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--steps", type=int, default=10_000)
    _add_common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MajsimError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except AssertionError as exc:
        sys.stderr.write(f"assertion failed: {exc}\n")
        return EXIT_ASSERT
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
