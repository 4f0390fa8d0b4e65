import math
from fractions import Fraction

import pytest

from conftest import random_graph
from twapprox import oracles
from twapprox.instances import gen_by_uncontraction, gen_figure1
from twapprox.problems import MsimInstance, SetColoringInstance, StarForestInstance, WmisInstance
from twapprox.recursion import RegimeParams, choose_depth, depth_cap, drive, exact_solve, level_factor
from twapprox.trigraph import InvalidInput, Trigraph
from twapprox.verify import check_solution


def K(n):
    return Trigraph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def chain(n):
    from twapprox.contraction import ContractionSequence
    steps, cur = [], 0
    for k in range(1, n):
        steps.append((cur, k, n + k - 1))
        cur = n + k - 1
    return ContractionSequence.of(n, steps)


def make(problem, g):
    if problem == "mis":
        return WmisInstance.unit(g)
    if problem == "setcol":
        return SetColoringInstance.unit(g)
    if problem == "msim":
        return MsimInstance.unit(g)
    return StarForestInstance.unit(g)


def test_choose_depth_examples():
    assert choose_depth(4096, RegimeParams("exact")) == 0
    assert choose_depth(4096, RegimeParams("fixed", q=5)) == 5
    assert choose_depth(4096, RegimeParams("eps", eps=0.5), F=3) == 2
    assert choose_depth(4096, RegimeParams("eps", eps=0.5), F=1) == depth_cap(4096) == 4
    assert choose_depth(1, RegimeParams("log"), F=5) == 0
    # log mode: 2^(2^q - 1) <= log2(2^16) = 16 -> q = 2
    assert choose_depth(2 ** 16, RegimeParams("log"), F=2) == 2
    with pytest.raises(InvalidInput):
        choose_depth(0, RegimeParams())


def test_regime_parse_and_invariants():
    assert RegimeParams.parse("q=2").q == 2
    assert RegimeParams.parse("eps=0.25").eps == 0.25
    assert RegimeParams.parse("log").mode == "log"
    assert RegimeParams.parse(" exact ").describe() == "exact"
    for bad in ["q=-1", "eps=0", "eps=x", "fast", "q"]:
        with pytest.raises(InvalidInput):
            RegimeParams.parse(bad)
    with pytest.raises(InvalidInput):
        RegimeParams(threshold=0)


def test_level_factor():
    assert level_factor("mis", 2) == 3
    assert level_factor("msim", 2) == 3 * 5
    assert level_factor("aihp", 1, h=3) == 8


@pytest.mark.parametrize("problem", ["mis", "setcol", "msim", "mlisf", "mief"])
def test_exact_and_threshold_match_oracle(problem):
    g, seq = gen_by_uncontraction(11, 2, seed=4)
    inst = make(problem, g)
    _, opt = exact_solve(problem, inst)
    res = drive(problem, inst, RegimeParams("exact"))
    assert res.value == opt and res.certified_bound == 1 and res.trace.depth == 0
    res = drive(problem, inst, RegimeParams("fixed", q=2, threshold=g.n), seq)
    assert res.value == opt and res.certified_bound == 1


def test_kn_q1_exact_bound():
    g = K(9)
    w = tuple(Fraction(i + 1) for i in range(9))
    res = drive("mis", WmisInstance(g, w), RegimeParams("fixed", q=1, threshold=1), chain(9))
    assert res.value == 9 and res.certified_bound == 1
    assert res.trace.d_eff_levels == [0]


def test_fig1_q1():
    g, seq = gen_figure1()
    res = drive("mis", WmisInstance.unit(g), RegimeParams("fixed", q=1, threshold=1), seq)
    check_solution("mis", WmisInstance.unit(g), res.solution)
    assert res.value * res.certified_bound >= 3
    assert res.trace.calls > 1 and res.trace.base_sizes


def test_drive_rejects():
    g = Trigraph.from_edges(3, black=[(0, 1)], red=[(1, 2)])
    with pytest.raises(InvalidInput):
        drive("mis", WmisInstance.unit(g))
    with pytest.raises(InvalidInput):
        drive("mis", SetColoringInstance.unit(K(3)))
    with pytest.raises(InvalidInput):
        drive("nope", WmisInstance.unit(K(3)))


def test_budget_is_an_error():
    g = random_graph(20, 0.5, 1)
    with pytest.raises(oracles.BudgetExceeded):
        drive("mis", WmisInstance.unit(g), RegimeParams(budget=oracles.OracleBudget(nodes=5)))


@pytest.mark.parametrize("problem", ["mis", "setcol", "msim", "mlisf"])
@pytest.mark.parametrize("seed", range(4))
def test_threshold_monotone(problem, seed):
    g, seq = gen_by_uncontraction(18, 2, seed=seed)
    inst = make(problem, g)
    prev = None
    for t in (1, 2, 3, 5, 8):
        b = drive(problem, inst, RegimeParams("fixed", q=2, threshold=t), seq).certified_bound
        if prev is not None:
            assert b <= prev
        prev = b


@pytest.mark.parametrize("mode", ["eps=0.5", "log"])
def test_eps_and_log_modes_run(mode):
    g, seq = gen_by_uncontraction(30, 1, seed=2)
    inst = WmisInstance.unit(g)
    res = drive("mis", inst, RegimeParams.parse(mode, threshold=2), seq)
    assert res.trace.depth <= depth_cap(30)
    _, opt = exact_solve("mis", inst)
    assert res.realized_ratio(opt) <= res.certified_bound


def test_deterministic():
    g, seq = gen_by_uncontraction(20, 3, seed=9)
    a = drive("msim", MsimInstance.unit(g), RegimeParams("fixed", q=2, threshold=1), seq)
    b = drive("msim", MsimInstance.unit(g), RegimeParams("fixed", q=2, threshold=1), seq)
    assert (a.solution, a.value, a.certified_bound) == (b.solution, b.value, b.certified_bound)


def test_shrink_recorded():
    g, seq = gen_by_uncontraction(64, 2, seed=1)
    res = drive("mis", WmisInstance.unit(g), RegimeParams("fixed", q=1, threshold=1), seq)
    # children are unions of at most two parts of size O(sqrt n)
    assert 0 < res.trace.shrink
    assert max(res.trace.base_sizes.values()) <= res.trace.shrink * math.sqrt(64) + 1e-9
