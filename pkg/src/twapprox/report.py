"""JSON and CSV serialization of results (schema v1).

Rationals are written as "p/q" strings so values survive a round trip exactly.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction

SCHEMA = "v1"
BENCH_FIELDS = ["instance", "n", "d_eff", "q", "value", "opt", "certified", "realized", "ms"]


def frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    return Fraction(s)


def solution_to_json(problem, sol):
    if problem in ("mis", "mief"):
        return [int(v) for v in sol]
    if problem == "setcol":
        return [sorted(int(c) for c in p) for p in sol]
    if problem == "msim":
        return [[int(u), int(v)] for u, v in sol]
    if problem == "mlisf":
        return [[int(c), [int(x) for x in ls]] for c, ls in sol]
    if problem == "aihp":
        return [[int(v) for v in t] for t in sol]
    raise ValueError(f"unknown problem {problem!r}")


def solution_from_json(problem, data):
    if problem in ("mis", "mief"):
        return [int(v) for v in data]
    if problem == "setcol":
        return [sorted(int(c) for c in p) for p in data]
    if problem == "msim":
        return [(int(u), int(v)) for u, v in data]
    if problem == "mlisf":
        return [(int(c), [int(x) for x in ls]) for c, ls in data]
    if problem == "aihp":
        return [tuple(int(v) for v in t) for t in data]
    raise ValueError(f"unknown problem {problem!r}")


def result_dict(res) -> dict:
    tr = res.trace.as_dict()
    return {
        "schema": SCHEMA,
        "problem": res.problem,
        "n": res.n,
        "regime": res.regime,
        "value": frac_str(res.value),
        "certified_bound": frac_str(res.certified_bound),
        "solution": solution_to_json(res.problem, res.solution),
        "trace": {"depth": tr["depth"], "calls": tr["calls"], "d_eff_levels": tr["d_eff_levels"],
                  "ms": tr["ms"], "base_sizes": tr["base_sizes"], "f": tr["f"], "notes": tr["notes"]},
    }


def dumps(res, indent=None) -> str:
    return json.dumps(result_dict(res), indent=indent)


def loads(text: str) -> dict:
    """Parse a v1 result; value, bound and solution come back as exact objects."""
    d = json.loads(text)
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {d.get('schema')!r}")
    d["value"] = parse_frac(d["value"])
    d["certified_bound"] = parse_frac(d["certified_bound"])
    d["solution"] = solution_from_json(d["problem"], d["solution"])
    return d


def write_bench_csv(rows, fh):
    w = csv.DictWriter(fh, fieldnames=BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in sorted(rows, key=lambda r: str(r["instance"])):
        w.writerow({k: row.get(k, "") for k in BENCH_FIELDS})
