"""Weighted independent set through a balanced partition.

Parts are solved on their own, the red quotient is split into red-free color
classes, and inside a class the black quotient (weighted by the part
solutions) decides which parts may be combined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .coloring import color_classes, greedy_degeneracy_coloring
from .problems import WmisInstance
from .recursion import SubResult
from .trigraph import Trigraph, black_graph, induced_subtrigraph, iter_bits
from .verify import check_independent


@dataclass
class MisTrace:
    parts: list
    part_values: list
    classes: list
    class_values: list = field(default_factory=list)
    winner: int = -1
    clusters: list | None = None


def solve_parts(inst, ctx, solve_sub, problem="mis"):
    """Per-part solutions lifted to original ids, their values, and the worst bound."""
    g = inst.graph
    sols, vals, r = [], [], Fraction(1)
    for p in ctx.partition.parts:
        sub, keep = induced_subtrigraph(g, p)
        res = solve_sub(problem, WmisInstance(sub, tuple(inst.weights[v] for v in keep)),
                        ctx.matrix_for_induced(p))
        sols.append(sorted(keep[x] for x in res.solution))
        vals.append(res.value)
        r = max(r, res.bound)
    return sols, vals, r


def pack_class(ctx, C, vals, solve_sub):
    """Heaviest set of pairwise black-non-adjacent parts of C (through a subcall)."""
    Hg, keep = induced_subtrigraph(black_graph(ctx.quotient), C)
    res = solve_sub("mis", WmisInstance(Hg, tuple(vals[i] for i in keep)), ctx.matrix_for_quotient(C))
    return [keep[x] for x in res.solution], res.bound


def wmis_approx(inst: WmisInstance, ctx, solve_sub) -> SubResult:
    if ctx is None:
        raise ValueError("wmis_approx needs a balanced partition context")
    g = inst.graph
    Q = ctx.quotient
    sols, vals, r_parts = solve_parts(inst, ctx, solve_sub)
    classes = color_classes(greedy_degeneracy_coloring(Q.red_adj))
    best, best_val, r_quot = [], Fraction(-1), Fraction(1)
    class_vals = []
    winner = -1
    for j, C in enumerate(classes):
        chosen, r = pack_class(ctx, C, vals, solve_sub)
        r_quot = max(r_quot, r)
        val = sum((vals[i] for i in chosen), Fraction(0))
        class_vals.append(val)
        if val > best_val:
            best_val, winner = val, j
            best = sorted(v for i in chosen for v in sols[i])
    check_independent(g, best)
    info = MisTrace(list(ctx.partition.parts), vals, classes, class_vals, winner)
    bound = len(classes) * r_parts * r_quot
    return SubResult(best, sum((Fraction(inst.weights[v]) for v in best), Fraction(0)), bound, info)


# -- clustered coloring variant -----------------------------------------------------

def clustered_coloring(masks, k, c, node_limit=200_000):
    """k-coloring whose monochromatic components have <= c vertices, or None.

    Plain backtracking in vertex order; the first vertex is fixed to color 0.
    """
    n = len(masks)
    col = [-1] * n
    nodes = [0]

    def comp_ok(v):
        seen = 1 << v
        frontier = seen
        while frontier:
            nxt = 0
            for u in iter_bits(frontier):
                for x in iter_bits(masks[u]):
                    if col[x] == col[v]:
                        nxt |= 1 << x
            frontier = nxt & ~seen
            seen |= frontier
            if seen.bit_count() > c:
                return False
        return True

    def rec(v):
        if v == n:
            return True
        nodes[0] += 1
        if nodes[0] > node_limit:
            raise TimeoutError
        for a in range(1 if v == 0 else k):
            col[v] = a
            if comp_ok(v) and rec(v + 1):
                return True
        col[v] = -1
        return False

    if n == 0:
        return []
    try:
        return list(col) if rec(0) else None
    except (TimeoutError, RecursionError):
        return None


def _components(masks, members):
    left = set(members)
    out = []
    while left:
        s = min(left)
        comp, stack = {s}, [s]
        while stack:
            u = stack.pop()
            for x in iter_bits(masks[u]):
                if x in left and x not in comp:
                    comp.add(x)
                    stack.append(x)
        left -= comp
        out.append(sorted(comp))
    return out


def wmis_clustered(inst: WmisInstance, ctx, solve_sub, cluster_cap: int = 3,
                   node_limit: int = 200_000) -> SubResult:
    if cluster_cap < 1:
        raise ValueError("cluster cap must be >= 1")
    g = inst.graph
    Q = ctx.quotient
    d = Q.max_red_degree()
    k = math.ceil((d + 2) / 3)
    col = clustered_coloring(list(Q.red_adj), k, cluster_cap, node_limit)
    if col is None:
        solve_sub.trace.note("clustered coloring not found; plain classes used")
        return wmis_approx(inst, ctx, solve_sub)
    parts = ctx.partition.parts
    classes = color_classes(col)
    best, best_val = [], Fraction(-1)
    r_sub, r_choice = Fraction(1), Fraction(1)
    for C in classes:
        comps = _components(Q.red_adj, C)
        nodes = []  # (component index, part subset, solution, value)
        for h, comp in enumerate(comps):
            for m in range(1, 1 << len(comp)):
                J = [comp[i] for i in range(len(comp)) if m >> i & 1]
                verts = sorted(v for z in J for v in parts[z])
                sub, keep = induced_subtrigraph(g, verts)
                res = solve_sub("mis", WmisInstance(sub, tuple(inst.weights[v] for v in keep)),
                                ctx.matrix_for_induced(verts))
                r_sub = max(r_sub, res.bound)
                if res.value > 0:
                    nodes.append((h, J, [keep[x] for x in res.solution], res.value))
        # choice graph: one subset per component, no black edge between chosen subsets
        adj = [0] * len(nodes)
        for a in range(len(nodes)):
            for b in range(a + 1, len(nodes)):
                ha, Ja = nodes[a][0], nodes[a][1]
                hb, Jb = nodes[b][0], nodes[b][1]
                if ha == hb or any(Q.has_black(x, y) for x in Ja for y in Jb):
                    adj[a] |= 1 << b
                    adj[b] |= 1 << a
        choice = Trigraph(len(nodes), tuple(adj), (0,) * len(nodes))
        res = solve_sub("mis", WmisInstance(choice, tuple(x[3] for x in nodes)))
        r_choice = max(r_choice, res.bound)
        val = sum((nodes[i][3] for i in res.solution), Fraction(0))
        if val > best_val:
            best_val = val
            best = sorted(v for i in res.solution for v in nodes[i][2])
    check_independent(g, best)
    info = MisTrace(list(parts), [], classes, clusters=[_components(Q.red_adj, C) for C in classes])
    return SubResult(best, sum((Fraction(inst.weights[v]) for v in best), Fraction(0)),
                     len(classes) * r_sub * r_choice, info)
