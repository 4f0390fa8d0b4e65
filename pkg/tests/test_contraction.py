import pytest

from conftest import random_graph
from twapprox.contraction import (ContractionSequence, SequenceError, apply_contraction, format_seq,
                                  leaf_order, parse_seq, partition_at, replay_prefix, verify_sequence)
from twapprox.instances import FIG1_NAMES, gen_by_uncontraction, greedy_sequence
from twapprox.trigraph import InvalidInput, Trigraph, quotient

ix = FIG1_NAMES.index


def K(n):
    return Trigraph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def groups(P):
    return {"".join(sorted(FIG1_NAMES[v] for v in p)) for p in P.parts}


def test_fig1_contract_ef(fig1):
    g, _ = fig1
    h = apply_contraction(g, ix("e"), ix("f"))
    w = h.n - 1  # merged vertex is last; others keep order
    others = [v for v in range(7) if v not in (ix("e"), ix("f"))]
    red = {FIG1_NAMES[others[min(e)]] for e in h.red}
    assert red == {"a", "d"} and all(w in e for e in h.red)


def test_contract_twins_and_isolated():
    g = K(4)
    assert not apply_contraction(g, 0, 1).red
    g = Trigraph.from_edges(3, [(0, 1)])
    h = apply_contraction(g, 0, 1)
    assert not h.red and not h.black


def test_contract_errors():
    with pytest.raises(InvalidInput):
        apply_contraction(K(3), 1, 1)
    with pytest.raises(SequenceError) as ei:
        verify_sequence(K(3), ContractionSequence.of(3, [(0, 1, 3), (0, 2, 4)]))
    assert ei.value.step == 1
    with pytest.raises(SequenceError):
        verify_sequence(K(3), ContractionSequence.of(3, [(0, 1, 2)]))


def test_fig1_width(fig1):
    g, seq = fig1
    assert len(seq.steps) == 6
    assert verify_sequence(g, seq).width == 2


def test_kn_width_zero():
    for n in range(1, 13):
        steps, cur = [], 0
        for k in range(1, n):
            steps.append((cur, k, n + k - 1))
            cur = n + k - 1
        assert verify_sequence(K(n), ContractionSequence.of(n, steps)).width == 0


def test_p4_width():
    g = Trigraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    rep = verify_sequence(g, ContractionSequence.of(4, [(0, 1, 4), (2, 3, 5), (4, 5, 6)]))
    assert rep.per_step == [1, 1, 0] and rep.width == 1


def test_partition_at_fig1(fig1):
    g, seq = fig1
    assert groups(partition_at(g, seq, 7)) == set(FIG1_NAMES)
    assert groups(partition_at(g, seq, 5)) == {"ef", "ad", "b", "c", "g"}
    assert groups(partition_at(g, seq, 3)) == {"adg", "bef", "c"}
    assert groups(partition_at(g, seq, 1)) == {FIG1_NAMES}
    with pytest.raises(InvalidInput):
        partition_at(g, seq, 0)
    with pytest.raises(InvalidInput):
        partition_at(g, seq, 8)


@pytest.mark.parametrize("seed", range(8))
def test_replay_matches_quotient(seed):
    g, seq = gen_by_uncontraction(14, 2, seed=seed)
    full = verify_sequence(g, seq)
    for i in range(1, g.n + 1):
        t = g.n - i
        live, members = replay_prefix(g, seq, t)
        P = partition_at(g, seq, i)
        order = [P.parts.index(tuple(m)) for m in members]
        Q = quotient(g, P)
        for a in range(live.n):
            for b in range(a + 1, live.n):
                assert live.has_black(a, b) == Q.has_black(order[a], order[b])
                assert live.has_red(a, b) == Q.has_red(order[a], order[b])
        prefix = ContractionSequence.of(g.n, seq.steps[:t])
        assert verify_sequence(g, prefix).width <= full.width


def test_seq_format_round_trip(fig1):
    _, seq = fig1
    assert parse_seq(format_seq(seq)) == seq
    for bad in ["c 0 1 2\n", "seq 3\nc 0 1\n", "seq x\n", "seq 3\nc 0 a 3\n"]:
        with pytest.raises(InvalidInput):
            parse_seq(bad)


def test_leaf_order_is_permutation(fig1):
    _, seq = fig1
    assert sorted(leaf_order(seq)) == list(range(7))


def test_greedy_sequence():
    assert greedy_sequence(K(6)).width == 0
    assert greedy_sequence(Trigraph.empty(5)).width == 0
    for seed in range(5):
        g = random_graph(9, 0.4, seed)
        res = greedy_sequence(g)
        assert verify_sequence(g, res.sequence).width == res.width


def test_greedy_fig1_cap(fig1):
    g, _ = fig1
    res = greedy_sequence(g, 2)
    assert res.sequence is not None
    assert verify_sequence(g, res.sequence).width <= 2
