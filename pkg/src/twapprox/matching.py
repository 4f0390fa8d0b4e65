"""Heaviest induced matching inside a prescribed edge set, via a balanced partition.

An optimal matching splits into edges inside parts, edges across red pairs of
parts, and edges across black pairs. Each kind gets its own candidate; the
returned bound is the sum of the bounds of the kinds that can occur at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .coloring import color_classes, distance2_edge_coloring, greedy_degeneracy_coloring
from .mis import pack_class
from .problems import MsimInstance
from .recursion import SubResult
from .trigraph import Trigraph, _pair, black_graph, induced_subtrigraph, iter_bits, red_graph
from .verify import check_induced_matching


@dataclass
class Branch:
    name: str
    solution: list = field(default_factory=list)
    value: Fraction = Fraction(0)
    bound: Fraction = Fraction(0)  # 0 = branch cannot hold any optimal edge
    detail: dict = field(default_factory=dict)


@dataclass
class MsimTrace:
    parts: list
    branches: list


def restrict_edges(inst, keep, pred=None):
    """Y and weights of ``inst`` re-keyed onto G[keep]; ``pred`` filters original edges."""
    index = {v: i for i, v in enumerate(keep)}
    Y, w = set(), {}
    for e in inst.Y:
        u, v = e
        if u in index and v in index and (pred is None or pred(e)):
            f = _pair(index[u], index[v])
            Y.add(f)
            if e in inst.edge_weights:
                w[f] = inst.edge_weights[e]
    return frozenset(Y), w


def _lift(keep, edges):
    return sorted(_pair(keep[a], keep[b]) for a, b in edges)


def cross_pairs(inst, part_of):
    """Y edges grouped by the unordered pair of parts they join (inside parts under (i, i))."""
    out = {}
    for e in sorted(inst.Y):
        a, b = part_of[e[0]], part_of[e[1]]
        out.setdefault((min(a, b), max(a, b)), []).append(e)
    return out


def branch_inside(inst, ctx, solve_sub, groups) -> Branch:
    br = Branch("inside")
    parts = ctx.partition.parts
    if not any(a == b for a, b in groups):
        return br
    g = inst.graph
    sols, vals, r_p = [], [], Fraction(1)
    for i, p in enumerate(parts):
        if (i, i) not in groups:
            sols.append([])
            vals.append(Fraction(0))
            continue
        sub, keep = induced_subtrigraph(g, p)
        Y, w = restrict_edges(inst, keep)
        res = solve_sub("msim", MsimInstance(sub, Y, w), ctx.matrix_for_induced(p))
        sols.append(_lift(keep, res.solution))
        vals.append(res.value)
        r_p = max(r_p, res.bound)
    classes = color_classes(greedy_degeneracy_coloring(ctx.quotient.red_adj))
    r_q = Fraction(1)
    best = Fraction(-1)
    for C in classes:
        chosen, r = pack_class(ctx, C, vals, solve_sub)
        r_q = max(r_q, r)
        val = sum((vals[i] for i in chosen), Fraction(0))
        if val > best:
            best = val
            br.solution = sorted(e for i in chosen for e in sols[i])
    br.value = max(best, Fraction(0))
    br.bound = len(classes) * r_p * r_q
    br.detail = {"classes": len(classes)}
    return br


def pack_pairs(ctx, pairs, colors, cross_solve, solve_sub):
    """Shared by the matching and star-forest solvers.

    ``pairs`` are pairs of parts, ``colors`` a distance-2 coloring of them,
    ``cross_solve(pair)`` a (solution, value, bound) triple for the pair. Per
    color class, a matching subcall on the quotient (class pairs made black)
    picks pairs whose solutions can coexist. Returns the best class's pick,
    its value, the number of classes with a usable pair, and max bounds.
    """
    Q = ctx.quotient
    per_pair = {}
    r_e = Fraction(1)
    for e in pairs:
        sol, val, r = cross_solve(e)
        r_e = max(r_e, r)
        if val > 0:
            per_pair[e] = (sol, val)
    by_class = {}
    for e in per_pair:
        by_class.setdefault(colors[e], []).append(e)
    best, best_val, r_h = [], Fraction(0), Fraction(1)
    for c in sorted(by_class):
        E = by_class[c]
        X = sorted({x for e in E for x in e})
        idx = {x: i for i, x in enumerate(X)}
        black = [0] * len(X)
        for i, x in enumerate(X):
            for y in iter_bits(Q.black_adj[x]):
                if y in idx:
                    black[i] |= 1 << idx[y]
        Yh, w = set(), {}
        for e in E:
            f = _pair(idx[e[0]], idx[e[1]])
            black[f[0]] |= 1 << f[1]
            black[f[1]] |= 1 << f[0]
            Yh.add(f)
            w[f] = per_pair[e][1]
        Hh = Trigraph(len(X), tuple(black), (0,) * len(X))
        res = solve_sub("msim", MsimInstance(Hh, frozenset(Yh), w), ctx.matrix_for_quotient(X))
        r_h = max(r_h, res.bound)
        picked = [(X[a], X[b]) for a, b in res.solution]
        val = sum((per_pair[e][1] for e in picked), Fraction(0))
        if val > best_val:
            best_val, best = val, picked
    return [(e, per_pair[e][0]) for e in best], best_val, len(by_class), r_e, r_h


def branch_red(inst, ctx, solve_sub, groups) -> Branch:
    br = Branch("red")
    Q = ctx.quotient
    pairs = sorted(e for e in groups if e[0] != e[1] and Q.has_red(*e))
    if not pairs:
        return br
    g = inst.graph
    parts = ctx.partition.parts
    colors = distance2_edge_coloring(red_graph(Q))

    def cross_solve(e):
        i, j = e
        verts = sorted(parts[i] + parts[j])
        sub, keep = induced_subtrigraph(g, verts)
        Pi = set(parts[i])
        Y, w = restrict_edges(inst, keep, lambda f: (f[0] in Pi) != (f[1] in Pi))
        res = solve_sub("msim", MsimInstance(sub, Y, w), ctx.matrix_for_induced(verts))
        return _lift(keep, res.solution), res.value, res.bound

    picked, val, z_used, r_e, r_h = pack_pairs(ctx, pairs, colors, cross_solve, solve_sub)
    br.solution = sorted(f for _, sol in picked for f in sol)
    br.value = val
    br.bound = max(z_used, 1) * r_e * r_h
    br.detail = {"z_colors": len(set(colors.values())), "z_used": z_used}
    return br


def branch_black(inst, ctx, solve_sub, groups) -> Branch:
    br = Branch("black")
    Q = ctx.quotient
    pairs = sorted(e for e in groups if e[0] != e[1] and Q.has_black(*e))
    if not pairs:
        return br
    omega, rep = {}, {}
    for e in pairs:
        best = None
        for f in groups[e]:
            wf = inst.w(f)
            if best is None or wf > best[0]:
                best = (wf, f)
        if best[0] > 0:
            omega[e], rep[e] = best
    Gp = black_graph(Q)
    res = solve_sub("msim", MsimInstance(Gp, frozenset(omega), dict(omega)),
                    ctx.matrix_for_quotient(range(Q.n)))
    chosen = sorted(_pair(*e) for e in res.solution)
    # pairs whose parts are joined by a red edge cannot be lifted together
    masks = [0] * len(chosen)
    for a in range(len(chosen)):
        for b in range(a + 1, len(chosen)):
            if any(Q.has_red(x, y) for x in chosen[a] for y in chosen[b]):
                masks[a] |= 1 << b
                masks[b] |= 1 << a
    cls = color_classes(greedy_degeneracy_coloring(masks))
    best, best_val = [], Fraction(0)
    for T in cls:
        val = sum((omega[chosen[i]] for i in T), Fraction(0))
        if val > best_val:
            best_val, best = val, T
    br.solution = sorted(rep[chosen[i]] for i in best)
    br.value = best_val
    br.bound = max(len(cls), 1) * res.bound
    br.detail = {"t_used": len(cls)}
    return br


def msim_approx(inst: MsimInstance, ctx, solve_sub) -> SubResult:
    if ctx is None:
        raise ValueError("msim_approx needs a balanced partition context")
    groups = cross_pairs(inst, ctx.partition.part_of)
    groups = {e: fs for e, fs in groups.items() if any(inst.w(f) > 0 for f in fs)}
    branches = [branch_inside(inst, ctx, solve_sub, groups), branch_red(inst, ctx, solve_sub, groups),
                branch_black(inst, ctx, solve_sub, groups)]
    win = max(branches, key=lambda b: b.value)
    for b in branches:
        check_induced_matching(inst.graph, b.solution, inst.Y)
    bound = sum((b.bound for b in branches), Fraction(0))
    sol = sorted(win.solution)
    value = sum((inst.w(e) for e in sol), Fraction(0))
    return SubResult(sol, value, max(bound, Fraction(1)), MsimTrace(list(ctx.partition.parts), branches))
