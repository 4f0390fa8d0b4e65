"""Budgeted exact solvers: recursion base cases and ground truth for tests.

MIS-type problems all reduce to a weighted independent set search over a
conflict graph (the compiled kernel when available). Set coloring runs an
exact DSatur branch and bound on the demand blow-up.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import kernels
from .problems import AihpInstance, MsimInstance, SetColoringInstance, StarForestInstance, WmisInstance
from .trigraph import InvalidInput, Trigraph, _pair, iter_bits


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class OracleBudget:
    nodes: int = 5_000_000
    ms: float | None = None

    def __post_init__(self):
        env = os.environ.get("TWW_BUDGET_MS")
        if env:
            cap = float(env)
            self.ms = cap if self.ms is None else min(self.ms, cap)
        if self.nodes <= 0 or (self.ms is not None and self.ms <= 0):
            raise InvalidInput("budgets must be positive")

    def deadline(self):
        return None if self.ms is None else time.perf_counter() + self.ms / 1000.0


DEFAULT = None


def _budget(b):
    return b if b is not None else OracleBudget()


def _check_deadline(deadline):
    if deadline is not None and time.perf_counter() > deadline:
        raise BudgetExceeded("oracle wall-time budget exceeded")


def _scale(weights):
    den = 1
    for w in weights:
        den = math.lcm(den, Fraction(w).denominator)
    return [int(Fraction(w) * den) for w in weights], den


def max_weight_independent(n, adj, weights, budget=None):
    """(sorted vertex list, Fraction value) of a heaviest independent set."""
    budget = _budget(budget)
    deadline = budget.deadline()
    if n == 0:
        return [], Fraction(0)
    iw, den = _scale(weights)
    try:
        mask, val, _ = kernels.mis_bnb(n, list(adj), iw, budget.nodes)
    except kernels.NodeBudgetExceeded as e:
        raise BudgetExceeded(str(e)) from None
    _check_deadline(deadline)
    return sorted(iter_bits(mask)), Fraction(val, den)


def exact_mis(g: Trigraph, weights=None, budget=None):
    if weights is None:
        weights = [1] * g.n
    adj = [g.black_adj[v] | g.red_adj[v] for v in range(g.n)]
    return max_weight_independent(g.n, adj, weights, budget)


def solve_wmis(inst: WmisInstance, budget=None):
    return exact_mis(inst.graph, inst.weights, budget)


# -- set coloring ----------------------------------------------------------------

def _blow_up(g, b):
    owner = []
    for v in range(g.n):
        owner += [v] * b[v]
    m = len(owner)
    start = {}
    for i, v in enumerate(owner):
        start.setdefault(v, i)
    adj = [0] * m
    for i in range(m):
        v = owner[i]
        a = 0
        for j in range(start[v], start[v] + b[v]):
            if j != i:
                a |= 1 << j
        for u in iter_bits(g.black_adj[v]):
            for j in range(start[u], start[u] + b[u]):
                a |= 1 << j
        adj[i] = a
    return owner, adj


def _greedy_clique_weight(g, b):
    best = 0
    for v in sorted(range(g.n), key=lambda x: (-b[x], x)):
        clique = [v]
        cand = g.black_adj[v]
        for u in sorted(iter_bits(cand), key=lambda x: (-b[x], x)):
            if all(g.has_black(u, c) for c in clique):
                clique.append(u)
        best = max(best, sum(b[c] for c in clique))
    return best


def exact_chromatic(m, adj, budget=None, lower=1, owner=None):
    """Exact vertex coloring (colors 0..k-1) by DSatur branch and bound.

    ``owner`` marks interchangeable copies (same owner, consecutive indices);
    they are then colored in index order with increasing colors, which prunes
    permuted duplicates without losing any coloring up to relabeling.
    """
    budget = _budget(budget)
    deadline = budget.deadline()
    if m == 0:
        return [], 0
    # greedy DSatur for the initial upper bound
    col = [-1] * m
    satc = [[0] * (m + 1) for _ in range(m)]
    sat = [0] * m
    deg = [adj[v].bit_count() for v in range(m)]

    def pick():
        bv, key = -1, None
        for v in range(m):
            if col[v] < 0:
                k = (sat[v], deg[v], -v)
                if key is None or k > key:
                    bv, key = v, k
        return bv

    def assign(v, c):
        col[v] = c
        for u in iter_bits(adj[v]):
            if satc[u][c] == 0:
                sat[u] += 1
            satc[u][c] += 1

    def unassign(v, c):
        col[v] = -1
        for u in iter_bits(adj[v]):
            satc[u][c] -= 1
            if satc[u][c] == 0:
                sat[u] -= 1

    order = []
    for _ in range(m):
        v = pick()
        c = 0
        while satc[v][c]:
            c += 1
        assign(v, c)
        order.append(v)
    best = list(col)
    best_k = max(col) + 1
    for v in reversed(order):
        unassign(v, col[v])
    lower = max(lower, 1)
    if best_k <= lower:
        return best, best_k
    nodes = [0]
    state = {"best": best, "k": best_k}

    def rec(ncol, used):
        nodes[0] += 1
        if nodes[0] > budget.nodes:
            raise BudgetExceeded(f"coloring search exceeded {budget.nodes} nodes")
        if nodes[0] & 1023 == 0:
            _check_deadline(deadline)
        if ncol == m:
            state["best"] = list(col)
            state["k"] = used
            return
        v = pick()
        lo = -1
        if owner is not None:
            # copies are colored in index order, each above the previous one
            while v > 0 and owner[v - 1] == owner[v] and col[v - 1] < 0:
                v -= 1
            if v > 0 and owner[v - 1] == owner[v]:
                lo = col[v - 1]
        for c in range(lo + 1, min(used + 1, state["k"] - 1)):
            if satc[v][c]:
                continue
            assign(v, c)
            rec(ncol + 1, max(used, c + 1))
            unassign(v, c)
            if state["k"] <= lower:
                return

    rec(0, 0)
    return state["best"], state["k"]


def exact_set_coloring(g: Trigraph, b=None, budget=None):
    """(palettes per vertex as sorted 1-based lists, total color count)."""
    if b is None:
        b = [1] * g.n
    if any(x < 1 for x in b):
        raise InvalidInput("demands must be positive")
    owner, adj = _blow_up(g, b)
    col, k = exact_chromatic(len(owner), adj, budget, lower=_greedy_clique_weight(g, b) if g.n else 1,
                             owner=owner)
    pal = [[] for _ in range(g.n)]
    for i, v in enumerate(owner):
        pal[v].append(col[i] + 1)
    return [sorted(p) for p in pal], k


def solve_setcol(inst: SetColoringInstance, budget=None):
    return exact_set_coloring(inst.graph, inst.demand, budget)


# -- induced matching --------------------------------------------------------------

def _touch(g, a, b):
    """Some vertex of a is adjacent to, or equal to, some vertex of b."""
    for x in a:
        for y in b:
            if x == y or g.has_black(x, y):
                return True
    return False


def conflict_graph(g, items):
    """items: list of vertex tuples; conflict = intersect or joined by an edge."""
    k = len(items)
    masks = [0] * k
    reach = []
    for it in items:
        m = 0
        for x in it:
            m |= (1 << x) | g.black_adj[x] | g.red_adj[x]
        reach.append(m)
    sets = [sum(1 << x for x in it) for it in items]
    for i in range(k):
        ri = reach[i]
        for j in range(i + 1, k):
            if ri & sets[j]:
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


def exact_msim(g: Trigraph, weights=None, Y=None, budget=None):
    """Heaviest induced matching inside Y: (sorted edge list, value)."""
    Y = frozenset(g.black) if Y is None else frozenset(_pair(*e) for e in Y)
    wf = (lambda e: Fraction(1)) if weights is None else weights
    edges = sorted(e for e in Y if wf(e) > 0)
    adj = conflict_graph(g, edges)
    sel, val = max_weight_independent(len(edges), adj, [wf(e) for e in edges], budget)
    return [edges[i] for i in sel], val


def solve_msim(inst: MsimInstance, budget=None):
    return exact_msim(inst.graph, inst.w, inst.Y, budget)


# -- star forests ------------------------------------------------------------------

def exact_mlisf(g: Trigraph, weights=None, Y=None, budget=None):
    """Heaviest collection of mutually induced stars over Y (leaf weights).

    Returns (stars as sorted (root, leaves) list, value).
    """
    Y = frozenset(g.black) if Y is None else frozenset(_pair(*e) for e in Y)
    if weights is None:
        weights = [1] * g.n
    pairs = sorted((c, l) for u, v in Y for c, l in ((u, v), (v, u)) if Fraction(weights[l]) > 0)
    k = len(pairs)
    adj = [0] * k
    for i in range(k):
        c1, l1 = pairs[i]
        for j in range(i + 1, k):
            c2, l2 = pairs[j]
            if c1 == c2:
                clash = g.has_black(l1, l2)
            else:
                clash = _touch(g, (c1, l1), (c2, l2))
            if clash:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    sel, val = max_weight_independent(k, adj, [weights[l] for _, l in pairs], budget)
    stars = {}
    for i in sel:
        c, l = pairs[i]
        stars.setdefault(c, []).append(l)
    return sorted((c, sorted(ls)) for c, ls in stars.items()), val


def solve_mlisf(inst: StarForestInstance, budget=None):
    return exact_mlisf(inst.graph, inst.weights, inst.Y, budget)


def exact_mief(g: Trigraph, Y=None, budget=None):
    """Largest edge count of an induced forest whose edges all lie in Y (brute force)."""
    budget = _budget(budget)
    deadline = budget.deadline()
    Y = frozenset(g.black) if Y is None else frozenset(_pair(*e) for e in Y)
    n = g.n
    if n > 22:
        raise BudgetExceeded("induced forest enumeration is capped at 22 vertices")
    adj = g.black_adj
    bad = [0] * n
    for u, v in g.black:
        if (u, v) not in Y:
            bad[u] |= 1 << v
            bad[v] |= 1 << u
    best, best_s = 0, 0
    for S in range(1 << n):
        if S & 0xFFF == 0:
            _check_deadline(deadline)
        ok = True
        e2 = 0
        m = S
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            if bad[v] & S:
                ok = False
                break
            e2 += (adj[v] & S).bit_count()
        if not ok or e2 // 2 <= best:
            continue
        e = e2 // 2
        # forest iff edges = vertices - components
        comps = 0
        left = S
        while left:
            low = left & -left
            seen = low
            frontier = low
            while frontier:
                nxt = 0
                f = frontier
                while f:
                    lb = f & -f
                    nxt |= adj[lb.bit_length() - 1]
                    f ^= lb
                frontier = nxt & S & ~seen
                seen |= frontier
            left &= ~seen
            comps += 1
        if e == S.bit_count() - comps:
            best, best_s = e, S
    return sorted(iter_bits(best_s)), best


# -- induced H-packing ---------------------------------------------------------------

def pattern_copies(g: Trigraph, H: Trigraph, gamma=None, gamma_h=None, within=None):
    """All label-preserving induced embeddings of H, as image tuples, lexicographic.

    ``within`` optionally restricts images to a vertex mask.
    """
    h = H.n
    if gamma is None:
        gamma = [0] * g.n
    if gamma_h is None:
        gamma_h = [0] * h
    allowed = within if within is not None else (1 << g.n) - 1
    # order pattern vertices so that each (after the first) has an earlier neighbour when possible
    order = []
    rest = list(range(h))
    while rest:
        nxt = next((x for x in rest if any(H.has_black(x, y) for y in order)), rest[0])
        order.append(nxt)
        rest.remove(nxt)
    out = []
    img = [-1] * h

    def rec(i, used):
        if i == h:
            out.append(tuple(img))
            return
        x = order[i]
        cand = allowed & ~used
        for y in order[:i]:
            if H.has_black(x, y):
                cand &= g.black_adj[img[y]]
            else:
                cand &= ~g.black_adj[img[y]]
            cand &= ~g.red_adj[img[y]]
        for v in iter_bits(cand):
            if gamma[v] != gamma_h[x]:
                continue
            img[x] = v
            rec(i + 1, used | (1 << v))
        img[x] = -1

    if h:
        rec(0, 0)
    return sorted(out)


def best_copies(g, H, weights, gamma=None, gamma_h=None, within=None):
    """One representative per vertex set: the heaviest embedding, lexicographic on ties."""
    best = {}
    for tup in pattern_copies(g, H, gamma, gamma_h, within):
        key = frozenset(tup)
        w = weights(tup)
        if key not in best or w > best[key][1]:
            best[key] = (tup, w)
    return sorted(best.values(), key=lambda tw: tw[0])


def exact_aihp(g: Trigraph, H: Trigraph, weights=None, gamma=None, gamma_h=None, budget=None):
    """Heaviest packing of pairwise non-adjacent induced labelled H-copies.

    Returns (list of image tuples, value).
    """
    from .problems import TupleWeights
    weights = weights if weights is not None else TupleWeights()
    cands = [(t, w) for t, w in best_copies(g, H, weights, gamma, gamma_h) if w > 0]
    items = [t for t, _ in cands]
    adj = conflict_graph(g, items)
    sel, val = max_weight_independent(len(items), adj, [w for _, w in cands], budget)
    return [items[i] for i in sel], val


def solve_aihp(inst: AihpInstance, budget=None):
    return exact_aihp(inst.graph, inst.pattern, inst.weights, inst.gamma, inst.gamma_h, budget)
