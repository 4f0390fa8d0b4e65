"""twapprox command line: verify, partition, solve, oracle, check, gen, bench.

Exit codes: 0 ok, 2 bad input, 3 oracle budget exceeded, 4 certificate violation.
Errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import instances, report
from .balance import CoarseningStalled, balanced_partition, parse_caps
from .contraction import format_seq, parse_seq, verify_sequence
from .oracles import BudgetExceeded, OracleBudget
from .problems import (AihpInstance, MsimInstance, SetColoringInstance, StarForestInstance,
                       WmisInstance, demands, edge_weights, labels, prescribed, tuple_weights,
                       vertex_weights)
from .recursion import PROBLEMS, RegimeParams, drive, exact_solve
from .trigraph import InvalidInput, Trigraph, format_tgf, parse_tgf
from .verify import Infeasible, check_solution

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_CERT = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code, kind, msg, **extra):
        super().__init__(msg)
        self.code, self.kind, self.extra = code, kind, extra


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_INPUT, "usage", message)


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliError(EXIT_INPUT, "io", f"{path}: {e.strerror}") from None


def load_graph(path):
    return parse_tgf(_read(path))


def load_seq(path):
    return parse_seq(_read(path)) if path else None


def build_instance(problem, g, extra, pattern_path=None, y_path=None):
    """Problem instance from a graph file's records (and optional side files)."""
    if problem == "mis":
        return WmisInstance(g, vertex_weights(g, extra))
    if problem == "setcol":
        return SetColoringInstance(g, demands(g, extra))
    y_recs = None
    if y_path:
        _, yx = parse_tgf(f"tgf {g.n}\n" + _read(y_path))
        y_recs = yx.get("y", [])
    Y = prescribed(g, extra, y_recs)
    if problem == "msim":
        return MsimInstance(g, Y, edge_weights(g, extra))
    if problem == "mlisf":
        return StarForestInstance(g, vertex_weights(g, extra), Y)
    if problem == "mief":
        return StarForestInstance(g, tuple(Fraction(1) for _ in range(g.n)), Y)
    if problem == "aihp":
        if not pattern_path:
            raise CliError(EXIT_INPUT, "usage", "aihp needs --pattern")
        H, hx = load_graph(pattern_path)
        gh_recs = extra.get("gh") or hx.get("g", [])
        return AihpInstance(g, H, tuple_weights(g, H.n, extra), labels(g.n, extra.get("g", [])),
                            labels(H.n, gh_recs))
    raise CliError(EXIT_INPUT, "usage", f"unknown problem {problem!r}")


def _regime(args):
    budget = OracleBudget(nodes=args.budget_nodes, ms=args.budget_ms)
    bal = parse_caps(args.caps)
    return RegimeParams.parse(args.regime, threshold=args.threshold, seed=args.seed,
                              balance=bal, budget=budget, clustered=args.clustered)


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2)
    if out:
        _write_atomic(out, text + "\n")
    else:
        print(text)


def _write_atomic(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


# -- subcommands ------------------------------------------------------------------------

def cmd_verify(args):
    g, _ = load_graph(args.graph)
    rep = verify_sequence(g, load_seq(args.seq))
    _emit(rep.as_dict())


def cmd_partition(args):
    g, _ = load_graph(args.graph)
    bp = balanced_partition(g, load_seq(args.seq), parse_caps(args.caps), trace=args.trace_balance)
    if args.trace_balance:
        for line in bp.trace_lines:
            print(line, file=sys.stderr)
    out = bp.summary()
    out["quotient_red_degree"] = bp.quotient.max_red_degree()
    _emit(out)


def _solve(args, g, extra):
    inst = build_instance(args.problem, g, extra, args.pattern, args.y)
    res = drive(args.problem, inst, _regime(args), load_seq(args.seq))
    value = check_solution(args.problem, inst, res.solution)
    if value != res.value:
        raise CliError(EXIT_CERT, "value-mismatch", "reported value differs from re-evaluation",
                       reported=report.frac_str(res.value), recomputed=report.frac_str(value))
    return inst, res


def cmd_solve(args):
    g, extra = load_graph(args.graph)
    _, res = _solve(args, g, extra)
    _emit(report.result_dict(res), args.out)


def cmd_oracle(args):
    g, extra = load_graph(args.graph)
    inst = build_instance(args.problem, g, extra, args.pattern, args.y)
    budget = OracleBudget(nodes=args.budget_nodes, ms=args.budget_ms)
    sol, val = exact_solve(args.problem, inst, budget)
    _emit({"schema": report.SCHEMA, "problem": args.problem, "n": g.n, "value": report.frac_str(val),
           "solution": report.solution_to_json(args.problem, sol)})


def check_one(args, g, extra):
    inst, res = _solve(args, g, extra)
    budget = OracleBudget(nodes=args.budget_nodes, ms=args.budget_ms)
    _, opt = exact_solve(args.problem, inst, budget)
    realized = res.realized_ratio(opt)
    return res, opt, realized


def cmd_check(args):
    g, extra = load_graph(args.graph)
    res, opt, realized = check_one(args, g, extra)
    ok = realized <= res.certified_bound
    out = {"problem": args.problem, "n": g.n, "regime": res.regime, "value": report.frac_str(res.value),
           "opt": report.frac_str(opt), "realized": report.frac_str(realized),
           "certified_bound": report.frac_str(res.certified_bound), "ok": ok}
    _emit(out)
    if not ok:
        raise CliError(EXIT_CERT, "certificate", "realized ratio exceeds certified bound", **out)


def cmd_gen(args):
    fam = args.family
    if fam == "figure1":
        g, seq = instances.gen_figure1()
    elif fam == "cograph":
        g, seq = instances.gen_cograph(args.n, seed=args.seed)
    elif fam == "uncontract":
        g, seq = instances.gen_by_uncontraction(args.n, args.d, seed=args.seed)
    else:
        rng = random.Random(args.seed)
        edges = [(u, v) for u in range(args.n) for v in range(u + 1, args.n) if rng.random() < args.p]
        g = Trigraph.from_edges(args.n, edges)
        gr = instances.greedy_sequence(g, args.d)
        if gr.sequence is None:
            raise CliError(EXIT_INPUT, "width", f"greedy width {gr.width} exceeds --d {args.d}",
                           width=gr.width)
        seq = gr.sequence
    rep = verify_sequence(g, seq)
    tgf, sq = f"{args.out}.tgf", f"{args.out}.seq"
    _write_atomic(tgf, format_tgf(g))
    _write_atomic(sq, format_seq(seq))
    _emit({"family": fam, "n": g.n, "width": rep.width, "files": [tgf, sq]})


def read_manifest(path):
    """CSV manifest with columns instance, graph, and optionally seq, problem, regime, pattern."""
    base = Path(path).parent
    rows = list(csv.DictReader(io.StringIO(_read(path))))
    if not rows or "instance" not in rows[0] or "graph" not in rows[0]:
        raise CliError(EXIT_INPUT, "manifest", "manifest needs 'instance' and 'graph' columns")
    for r in rows:
        for key in ("graph", "seq", "pattern"):
            if r.get(key):
                r[key] = str(base / r[key])
    return rows


def cmd_bench(args):
    rows = []
    violations = []
    for entry in read_manifest(args.manifest):
        ns = argparse.Namespace(**vars(args))
        ns.problem = entry.get("problem") or args.problem
        ns.regime = entry.get("regime") or args.regime
        ns.seq = entry.get("seq") or None
        ns.pattern = entry.get("pattern") or None
        ns.y = None
        g, extra = load_graph(entry["graph"])
        if args.oracle:
            res, opt, realized = check_one(ns, g, extra)
            if realized > res.certified_bound:
                violations.append(entry["instance"])
        else:
            _, res = _solve(ns, g, extra)
            opt = realized = None
        rows.append({"instance": entry["instance"], "n": g.n,
                     "d_eff": max(res.trace.d_eff_levels, default=0), "q": res.trace.depth,
                     "value": report.frac_str(res.value),
                     "opt": "" if opt is None else report.frac_str(opt),
                     "certified": report.frac_str(res.certified_bound),
                     "realized": "" if realized is None else report.frac_str(realized),
                     "ms": round(res.trace.ms, 3)})
    buf = io.StringIO()
    report.write_bench_csv(rows, buf)
    if args.out:
        _write_atomic(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if violations:
        raise CliError(EXIT_CERT, "certificate", "realized ratio exceeds certified bound",
                       instances=violations)


# -- parser ---------------------------------------------------------------------------

def _solver_flags(p, regime=True):
    p.add_argument("graph")
    p.add_argument("--problem", choices=PROBLEMS, default="mis")
    if regime:
        p.add_argument("--regime", default="exact", help="exact | q=<k> | eps=<x> | log")
        p.add_argument("--threshold", type=int, default=3)
        p.add_argument("--seq", help="contraction sequence seeding the top partition")
        p.add_argument("--caps", default="practical")
        p.add_argument("--clustered", action="store_true", help="clustered-coloring variant for mis")
    p.add_argument("--pattern", help="pattern graph file (aihp)")
    p.add_argument("--y", help="file of 'y u v' lines; default Y = all edges")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget-ms", type=float, default=None,
                        help="oracle wall-clock cap (also TWW_BUDGET_MS)")
    common.add_argument("--budget-nodes", type=int, default=5_000_000)
    ap = _Parser(prog="twapprox", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="replay a contraction sequence")
    p.add_argument("graph")
    p.add_argument("seq")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("partition", parents=[common], help="balanced partition summary")
    p.add_argument("graph")
    p.add_argument("--seq")
    p.add_argument("--caps", default="practical")
    p.add_argument("--trace-balance", action="store_true")
    p.set_defaults(fn=cmd_partition)

    p = sub.add_parser("solve", parents=[common], help="approximate a problem")
    _solver_flags(p)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("oracle", parents=[common], help="exact value by brute force")
    _solver_flags(p, regime=False)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("check", parents=[common], help="solve, run the oracle, compare with the certificate")
    _solver_flags(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("gen", parents=[common], help="write a graph and its contraction sequence")
    p.add_argument("--family", choices=["figure1", "cograph", "uncontract", "greedy"], default="figure1")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--p", type=float, default=0.3, help="edge probability (greedy)")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("bench", parents=[common], help="run a manifest, emit CSV")
    p.add_argument("manifest")
    p.add_argument("--problem", choices=PROBLEMS, default="mis")
    p.add_argument("--regime", default="q=1")
    p.add_argument("--threshold", type=int, default=3)
    p.add_argument("--caps", default="practical")
    p.add_argument("--clustered", action="store_true")
    p.add_argument("--oracle", action="store_true", help="also compute OPT and the realized ratio")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.fn(args)
        return EXIT_OK
    except CliError as e:
        err = {"error": e.kind, "message": str(e), **e.extra}
        code = e.code
    except BudgetExceeded as e:
        err, code = {"error": "budget", "message": str(e)}, EXIT_BUDGET
    except CoarseningStalled as e:
        err, code = {"error": "stalled", "message": str(e), **e.diagnostics}, EXIT_INPUT
    except Infeasible as e:
        err, code = {"error": "infeasible", "message": str(e)}, EXIT_CERT
    except (InvalidInput, ValueError) as e:
        err, code = {"error": "input", "message": str(e)}, EXIT_INPUT
    print(json.dumps(err, default=str), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
