import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from twapprox import report
from twapprox.instances import gen_by_uncontraction, gen_figure1
from twapprox.problems import (AihpInstance, MsimInstance, SetColoringInstance, StarForestInstance,
                               WmisInstance)
from twapprox.recursion import RegimeParams, drive
from twapprox.trigraph import Trigraph

GOLDEN = Path(__file__).parent / "golden"


def test_exact_bound_serialization():
    res = drive("mis", WmisInstance.unit(Trigraph.empty(3)))
    assert '"certified_bound": "1/1"' in report.dumps(res)


def test_empty_solution():
    res = drive("msim", MsimInstance.unit(Trigraph.empty(3)))
    d = json.loads(report.dumps(res))
    assert d["solution"] == [] and d["value"] == "0/1"


def test_field_order():
    res = drive("mis", WmisInstance.unit(Trigraph.empty(2)))
    assert list(json.loads(report.dumps(res))) == ["schema", "problem", "n", "regime", "value",
                                                   "certified_bound", "solution", "trace"]
    assert list(report.result_dict(res)["trace"])[:4] == ["depth", "calls", "d_eff_levels", "ms"]


def test_fig1_golden():
    g, seq = gen_figure1()
    res = drive("mis", WmisInstance.unit(g), RegimeParams("fixed", q=1, threshold=1), seq)
    d = json.loads(report.dumps(res))
    d["trace"].pop("ms")
    assert d == json.loads((GOLDEN / "fig1_mis_q1.json").read_text())


def _instances(g):
    from twapprox.problems import TupleWeights
    H = Trigraph.from_edges(3, [(0, 1), (1, 2)])
    return {"mis": WmisInstance(g, tuple(Fraction(v % 3 + 1, 2) for v in range(g.n))),
            "setcol": SetColoringInstance(g, tuple(1 + v % 2 for v in range(g.n))),
            "msim": MsimInstance(g, frozenset(g.black), {e: Fraction(e[0] + 1, 3) for e in g.black}),
            "mlisf": StarForestInstance.unit(g), "mief": StarForestInstance.unit(g),
            "aihp": AihpInstance(g, H)}


@pytest.mark.parametrize("problem", ["mis", "setcol", "msim", "mlisf", "mief", "aihp"])
@pytest.mark.parametrize("seed", range(3))
def test_round_trip(problem, seed):
    g, seq = gen_by_uncontraction(12, 2, seed=seed)
    res = drive(problem, _instances(g)[problem], RegimeParams("fixed", q=1, threshold=2), seq)
    back = report.loads(report.dumps(res))
    assert back["value"] == res.value
    assert back["certified_bound"] == res.certified_bound
    assert back["solution"] == report.solution_from_json(problem, report.solution_to_json(problem, res.solution))
    norm = {"msim": lambda s: [tuple(e) for e in s], "aihp": lambda s: [tuple(t) for t in s],
            "mlisf": lambda s: [(c, list(ls)) for c, ls in s]}.get(problem, lambda s: [list(x) if isinstance(x, (list, tuple)) else x for x in s])
    assert back["solution"] == norm(res.solution)


@settings(max_examples=200, deadline=None)
@given(st.fractions())
def test_fraction_round_trip(x):
    assert report.parse_frac(report.frac_str(x)) == x


def test_bad_schema():
    with pytest.raises(ValueError):
        report.loads('{"schema": "v0"}')


def test_bench_csv_sorted():
    rows = [{"instance": "b", "n": 3}, {"instance": "a", "n": 5, "opt": "1/1"}]
    buf = io.StringIO()
    report.write_bench_csv(rows, buf)
    out = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert [r["instance"] for r in out] == ["a", "b"]
    assert list(out[0]) == report.BENCH_FIELDS
