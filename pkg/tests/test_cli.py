import csv
import io
import json

import pytest

from twapprox.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def fig1_files(tmp_path, capsys):
    prefix = tmp_path / "fig1"
    code, _, _ = run(capsys, "gen", "--family", "figure1", "--out", prefix)
    assert code == 0
    return tmp_path / "fig1.tgf", tmp_path / "fig1.seq"


def test_verify_fig1(fig1_files, capsys):
    code, out, _ = run(capsys, "verify", *fig1_files)
    assert code == 0 and json.loads(out)["width"] == 2


def test_solve_k5(tmp_path, capsys):
    k5 = tmp_path / "k5.tgf"
    k5.write_text("tgf 5\n" + "".join(f"b {u} {v}\n" for u in range(5) for v in range(u + 1, 5)))
    code, out, _ = run(capsys, "solve", k5, "--problem", "mis", "--regime", "exact")
    d = json.loads(out)
    assert code == 0 and d["value"] == "1/1" and d["certified_bound"] == "1/1"


def test_check_fig1(fig1_files, capsys):
    g, s = fig1_files
    code, out, _ = run(capsys, "check", g, "--problem", "mis", "--regime", "q=1", "--seq", s)
    d = json.loads(out)
    assert code == 0 and d["ok"]


@pytest.mark.parametrize("problem", ["setcol", "msim", "mlisf", "mief"])
def test_check_other_problems(fig1_files, capsys, problem):
    g, s = fig1_files
    code, out, _ = run(capsys, "check", g, "--problem", problem, "--regime", "q=1", "--threshold", "1", "--seq", s)
    assert code == 0 and json.loads(out)["ok"]


def test_aihp_pattern(fig1_files, tmp_path, capsys):
    g, _ = fig1_files
    p3 = tmp_path / "p3.tgf"
    p3.write_text("tgf 3\nb 0 1\nb 1 2\n")
    code, out, _ = run(capsys, "check", g, "--problem", "aihp", "--pattern", p3, "--regime", "q=1")
    assert code == 0 and json.loads(out)["ok"]
    code, _, err = run(capsys, "solve", g, "--problem", "aihp")
    assert code == 2 and json.loads(err)["error"] == "usage"


def test_oracle(fig1_files, capsys):
    g, _ = fig1_files
    code, out, _ = run(capsys, "oracle", g, "--problem", "setcol")
    assert code == 0 and json.loads(out)["value"] == "4/1"


def test_partition(fig1_files, capsys):
    g, s = fig1_files
    code, out, err = run(capsys, "partition", g, "--seq", s, "--trace-balance", "--caps", "mv=4,ps=4")
    d = json.loads(out)
    assert code == 0 and d["parts"] == 2 and d["quotient_red_degree"] == d["achieved_red_degree"]
    assert err.startswith("round")


def test_input_errors(tmp_path, capsys):
    code, _, err = run(capsys, "solve", tmp_path / "missing.tgf")
    assert code == 2 and json.loads(err)["error"] == "io"
    bad = tmp_path / "bad.tgf"
    bad.write_text("tgf 2\nb 0 7\n")
    code, _, err = run(capsys, "solve", bad)
    assert code == 2 and "message" in json.loads(err)
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and json.loads(err)["error"] == "usage"
    ok = tmp_path / "ok.tgf"
    ok.write_text("tgf 2\nb 0 1\n")
    code, _, err = run(capsys, "solve", ok, "--regime", "q=zz")
    assert code == 2


def test_budget_error(tmp_path, capsys):
    from conftest import random_graph
    from twapprox.trigraph import format_tgf
    g = tmp_path / "g.tgf"
    g.write_text(format_tgf(random_graph(22, 0.5, 3)))
    code, _, err = run(capsys, "oracle", g, "--problem", "mis", "--budget-nodes", "3")
    assert code == 3 and json.loads(err)["error"] == "budget"


def test_env_budget(tmp_path, capsys, monkeypatch):
    from twapprox.oracles import OracleBudget
    monkeypatch.setenv("TWW_BUDGET_MS", "250")
    assert OracleBudget().ms == 250
    assert OracleBudget(ms=100).ms == 100


def test_records_are_used(tmp_path, capsys):
    g = tmp_path / "w.tgf"
    g.write_text("tgf 3\nb 0 1\nb 1 2\nw 1 5/2\nd 0 2\n")
    code, out, _ = run(capsys, "solve", g, "--problem", "mis")
    assert json.loads(out)["value"] == "5/2"
    code, out, _ = run(capsys, "solve", g, "--problem", "setcol")
    assert json.loads(out)["value"] == "3/1"
    y = tmp_path / "y.txt"
    y.write_text("y 1 2\n")
    code, out, _ = run(capsys, "solve", g, "--problem", "msim", "--y", y)
    assert json.loads(out)["solution"] == [[1, 2]]


@pytest.mark.parametrize("family", ["cograph", "uncontract", "greedy"])
def test_gen_families(tmp_path, capsys, family):
    code, out, _ = run(capsys, "gen", "--family", family, "--n", 12, "--d", 3, "--seed", 5,
                       "--out", tmp_path / "x")
    assert code == 0
    d = json.loads(out)
    code, out, _ = run(capsys, "verify", *d["files"])
    assert code == 0 and json.loads(out)["width"] == d["width"]


def test_gen_greedy_width_error(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "--family", "greedy", "--n", 14, "--d", 0, "--p", 0.5,
                       "--out", tmp_path / "x")
    assert code == 2 and json.loads(err)["error"] == "width"


def test_bench(tmp_path, capsys):
    rows = []
    for i in range(3):
        run(capsys, "gen", "--family", "uncontract", "--n", 10 + i, "--d", 2, "--seed", i, "--out", tmp_path / f"i{i}")
        rows.append(f"inst{2 - i},i{i}.tgf,i{i}.seq")
    man = tmp_path / "manifest.csv"
    man.write_text("instance,graph,seq\n" + "\n".join(rows) + "\n")
    code, out, _ = run(capsys, "bench", man, "--problem", "msim", "--regime", "q=1", "--oracle")
    assert code == 0
    table = list(csv.DictReader(io.StringIO(out)))
    assert [r["instance"] for r in table] == ["inst0", "inst1", "inst2"]
    for r in table:
        from fractions import Fraction
        assert Fraction(r["realized"]) <= Fraction(r["certified"])
    bad = tmp_path / "bad.csv"
    bad.write_text("name\nx\n")
    code, _, err = run(capsys, "bench", bad)
    assert code == 2


def test_solve_out_file(fig1_files, tmp_path, capsys):
    g, s = fig1_files
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "solve", g, "--regime", "q=1", "--seq", s, "--out", out)
    from twapprox.report import loads
    assert code == 0 and loads(out.read_text())["problem"] == "mis"


def test_certificate_violation_exit(fig1_files, capsys, monkeypatch):
    import twapprox.cli as cli
    real = cli.drive

    def lying(*a, **kw):
        res = real(*a, **kw)
        res.certified_bound = 1
        return res

    monkeypatch.setattr(cli, "drive", lying)
    g, s = fig1_files
    code, _, err = run(capsys, "check", g, "--problem", "mis", "--regime", "q=1", "--seq", s)
    d = json.loads(err)
    assert code == 4 and d["error"] == "certificate" and d["realized"] == "3/2"
