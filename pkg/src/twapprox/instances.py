"""Instance generators with certified contraction sequences, plus a greedy sequencer."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .contraction import ContractionSequence, LiveTrigraph, verify_sequence
from .trigraph import Trigraph

FIG1_NAMES = "abcdefg"
FIG1_EDGES = ["ab", "ad", "af", "bc", "bd", "be", "bf", "ce", "cf", "de", "dg", "eg", "fg"]


def _ix(ch):
    return FIG1_NAMES.index(ch)


def gen_figure1() -> tuple[Trigraph, ContractionSequence]:
    g = Trigraph.from_edges(7, [(_ix(x), _ix(y)) for x, y in FIG1_EDGES])
    e, f, a, d, b, gg, c = (_ix(ch) for ch in "efadbgc")
    steps = [(e, f, 7), (a, d, 8), (b, 7, 9), (8, gg, 10), (9, c, 11), (10, 11, 12)]
    return g, ContractionSequence.of(7, steps)


def gen_cograph(n: int, seed: int = 0, p_join: float = 0.5) -> tuple[Trigraph, ContractionSequence]:
    """Random cotree; the sequence contracts sibling subtrees bottom-up (always twins)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    black = []
    steps = []
    nxt = [n]
    labels = list(range(n))
    rng.shuffle(labels)
    it = iter(labels)

    def build(size):
        # returns (leaf list, id of the contracted root)
        if size == 1:
            v = next(it)
            return [v], v
        k = rng.randint(1, size - 1)
        la, ra = build(k)
        lb, rb = build(size - k)
        if rng.random() < p_join:
            black.extend((u, v) for u in la for v in lb)
        w = nxt[0]
        nxt[0] += 1
        steps.append((ra, rb, w))
        return la + lb, w

    build(n)
    return Trigraph.from_edges(n, black), ContractionSequence.of(n, steps)


# relations of the two children towards a red neighbour of their parent
_RED_SPLITS = [(a, b) for a in "b0r" for b in "b0r" if (a, b) not in (("b", "b"), ("0", "0"))]


@dataclass
class _Node:
    size: int


def gen_by_uncontraction(n: int, d: int, seed: int = 0, p_red: float = 0.5,
                         retries: int = 64) -> tuple[Trigraph, ContractionSequence]:
    """Grow a graph from K1 by splitting vertices while red degrees stay <= d.

    The splits, read backwards, are a contraction sequence whose replay
    certifies width <= d.
    """
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    rng = random.Random(seed)
    # live trigraph over temporary ids; size[x] = number of final leaves below x
    black = {0: set()}
    red = {0: set()}
    size = {0: n}
    nid = [1]
    splits = []  # (parent, child1, child2)

    def rel(x, z):
        if z in black[x]:
            return "b"
        if z in red[x]:
            return "r"
        return "0"

    while True:
        open_ = sorted(x for x in size if size[x] > 1)
        if not open_:
            break
        x = rng.choice(open_)
        k = rng.randint(1, size[x] - 1)
        s1, s2 = k, size[x] - k
        final1, final2 = s1 == 1, s2 == 1
        nbrs = sorted(black[x] | red[x])
        red_nbrs = sorted(red[x])

        def attempt(safe):
            plan = {}
            for z in red_nbrs:
                if safe:
                    plan[z] = rng.choice([("b", "0"), ("0", "b")])
                else:
                    plan[z] = rng.choice(_RED_SPLITS)
            if safe or (final1 and final2):
                inner = rng.choice("b0")
            else:
                inner = rng.choice("b0r") if rng.random() < p_red else rng.choice("b0")
            return plan, inner

        def ok(plan, inner):
            deg1 = sum(1 for z in red_nbrs if plan[z][0] == "r") + (inner == "r")
            deg2 = sum(1 for z in red_nbrs if plan[z][1] == "r") + (inner == "r")
            if deg1 > d or deg2 > d:
                return False
            for z in red_nbrs:
                a, b = plan[z]
                if size[z] == 1 and ((a == "r" and final1) or (b == "r" and final2)):
                    return False
                new = len(red[z]) - 1 + (a == "r") + (b == "r")
                if new > d:
                    return False
            return True

        for _ in range(retries):
            plan, inner = attempt(False)
            if ok(plan, inner):
                break
        else:
            plan, inner = attempt(True)
        c1, c2 = nid[0], nid[0] + 1
        nid[0] += 2
        for c in (c1, c2):
            black[c] = set()
            red[c] = set()
        for z in nbrs:
            black[z].discard(x)
            red[z].discard(x)
            if z in black[x]:
                pair = ("b", "b")
            else:
                pair = plan[z]
            for c, r in zip((c1, c2), pair):
                if r == "b":
                    black[c].add(z); black[z].add(c)
                elif r == "r":
                    red[c].add(z); red[z].add(c)
        if inner == "b":
            black[c1].add(c2); black[c2].add(c1)
        elif inner == "r":
            red[c1].add(c2); red[c2].add(c1)
        del black[x], red[x]
        size[c1], size[c2] = s1, s2
        del size[x]
        splits.append((x, c1, c2))

    leaves = sorted(size)
    labels = list(range(n))
    rng.shuffle(labels)
    name = dict(zip(leaves, labels))
    assert not any(red[x] for x in leaves)
    edges = {(min(name[u], name[v]), max(name[u], name[v])) for u in leaves for v in black[u]}
    g = Trigraph.from_edges(n, sorted(edges))
    steps = []
    nxt = n
    for x, c1, c2 in reversed(splits):
        name[x] = nxt
        steps.append((name[c1], name[c2], nxt))
        nxt += 1
    seq = ContractionSequence.of(n, steps)
    rep = verify_sequence(g, seq)
    assert rep.width <= d, (rep.width, d, seed)
    return g, seq


@dataclass
class GreedyResult:
    sequence: ContractionSequence | None
    width: int


def greedy_sequence(g: Trigraph, d_cap: int | None = None) -> GreedyResult:
    """Contract, at every step, the pair minimising the resulting max red degree.

    Ties go to the fewest red edges at the new vertex, then lexicographic ids.
    Returns the sequence when its width is within ``d_cap`` (None = no cap).
    """
    live = LiveTrigraph(g)
    nxt = g.n
    steps = []
    width = g.max_red_degree()
    while len(live.black) > 1:
        ids = sorted(live.black)
        rdeg = {x: len(live.red[x]) for x in ids}
        best = None
        for i, u in enumerate(ids):
            bu, ru = live.black[u], live.red[u]
            for v in ids[i + 1:]:
                bv, rv = live.black[v], live.red[v]
                nb = (bu & bv) - {u, v}
                nr = ((ru | rv | (bu ^ bv)) - nb) - {u, v}
                worst = len(nr)
                for z in nr:
                    dz = rdeg[z] - (u in live.red[z]) - (v in live.red[z]) + 1
                    if dz > worst:
                        worst = dz
                # untouched vertices keep or lower their degree
                for z in ids:
                    if z in nr or z == u or z == v:
                        continue
                    dz = rdeg[z] - (u in live.red[z]) - (v in live.red[z])
                    if dz > worst:
                        worst = dz
                key = (worst, len(nr), u, v)
                if best is None or key < best:
                    best = key
        worst, _, u, v = best
        live.contract(u, v, nxt)
        steps.append((u, v, nxt))
        nxt += 1
        width = max(width, live.max_red_degree())
    seq = ContractionSequence.of(g.n, steps)
    if d_cap is not None and width > d_cap:
        return GreedyResult(None, width)
    return GreedyResult(seq, width)
