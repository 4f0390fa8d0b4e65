"""Induced packings: labelled H-copies (small connected H) and induced star forests.

H-packing groups candidate copies by the set of parts they touch. The
quotient restricted to such a set is a "compatible trigraph" of H, and sets
of the same shape are combined by one more packing call on the total graph of
the quotient. Star forests follow the three-way split used for matchings:
edges inside parts, across red (or partially prescribed) pairs, and across
fully prescribed black pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .coloring import color_classes, distance2_edge_coloring, greedy_degeneracy_coloring
from .matching import Branch, pack_pairs
from .mis import pack_class, wmis_approx
from .oracles import pattern_copies
from .problems import (AihpInstance, MsimInstance, StarForestInstance, TupleWeights, WmisInstance,
                       is_connected)
from .recursion import SubResult
from .trigraph import (ABSENT, BLACK, InvalidInput, Trigraph, VertexPartition, _pair, black_graph,
                       cleanup, induced_subtrigraph, mask_of, quotient, total_graph)
from .verify import check_aihp, check_induced_forest, check_star_forest

H_CAP = 4


def check_pattern(H: Trigraph, cap: int = H_CAP):
    if H.n < 1:
        raise InvalidInput("pattern must have a vertex")
    if H.n > cap:
        raise InvalidInput(f"pattern has {H.n} vertices, cap is {cap}")
    if H.red:
        raise InvalidInput("pattern must be a graph")
    if not is_connected(H):
        raise InvalidInput("pattern must be connected")


# -- compatible trigraphs ------------------------------------------------------------

def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def _rel(g, i, j):
    return 2 if g.has_red(i, j) else 1 if g.has_black(i, j) else 0


def canonical_key(g: Trigraph) -> tuple:
    """Isomorphism-invariant code: the smallest pair-relation vector over vertex orders."""
    k = g.n
    best = None
    for perm in permutations(range(k)):
        code = tuple(_rel(g, perm[a], perm[b]) for a, b in combinations(range(k), 2))
        if best is None or code < best:
            best = code
    return (k, best)


def from_key(key) -> Trigraph:
    k, code = key
    black, red = [], []
    for (a, b), c in zip(combinations(range(k), 2), code):
        if c == 1:
            black.append((a, b))
        elif c == 2:
            red.append((a, b))
    return Trigraph.from_edges(k, black, red)


@dataclass(frozen=True)
class CompatibleTrigraph:
    trigraph: Trigraph  # vertex i is block i of ``partition``
    partition: tuple  # blocks of V(H)
    added_red: tuple  # pairs of blocks turned red on top of H/Q
    witness: dict = field(hash=False, compare=False)  # resolution giving back H/Q
    key: tuple = ()

    @property
    def has_black(self) -> bool:
        return bool(self.trigraph.black)

    def check(self, H: Trigraph) -> bool:
        base = quotient(H, VertexPartition.of(self.partition, H.n))
        return cleanup(self.trigraph, self.witness) == base


def compatible_trigraphs(H: Trigraph, cap: int = H_CAP) -> list[CompatibleTrigraph]:
    """All trigraphs obtained from some H/Q by turning pairs red, one per isomorphism type."""
    check_pattern(H, cap)
    out, seen = [], set()
    for blocks in set_partitions(range(H.n)):
        P = VertexPartition.of(blocks, H.n)
        base = quotient(H, P)
        k = base.n
        free = [(i, j) for i, j in combinations(range(k), 2) if not base.has_red(i, j)]
        for m in range(1 << len(free)):
            add = tuple(free[t] for t in range(len(free)) if m >> t & 1)
            black, red = list(base.black_adj), list(base.red_adj)
            for i, j in add:
                black[i] &= ~(1 << j)
                black[j] &= ~(1 << i)
                red[i] |= 1 << j
                red[j] |= 1 << i
            tg = Trigraph(k, tuple(black), tuple(red))
            key = canonical_key(tg)
            if key in seen:
                continue
            seen.add(key)
            witness = {e: BLACK if base.has_black(*e) else ABSENT for e in add}
            out.append(CompatibleTrigraph(tg, P.parts, add, witness, key))
    return out


def connected_sets(masks, kmax):
    """Vertex sets of size <= kmax inducing a connected subgraph, as sorted tuples."""
    n = len(masks)
    layer = {frozenset([v]) for v in range(n)}
    out = set(layer)
    for _ in range(kmax - 1):
        nxt = set()
        for S in layer:
            reach = 0
            for v in S:
                reach |= masks[v]
            for u in range(n):
                if reach >> u & 1 and u not in S:
                    nxt.add(S | {u})
        out |= nxt
        layer = nxt
    return sorted(tuple(sorted(S)) for S in out)


# -- H-packing -------------------------------------------------------------------------

@dataclass
class AihpRun:
    key: tuple
    case: str  # "A" (some black pair) or "B"
    candidates: int
    classes: int
    bound: Fraction
    value: Fraction


def _aihp_k1(inst, ctx, solve_sub):
    w = tuple(inst.weights((v,)) if inst.gamma[v] == inst.gamma_h[0] else Fraction(0)
              for v in range(inst.n))
    res = wmis_approx(WmisInstance(inst.graph, w), ctx, solve_sub)
    sol = [(v,) for v in res.solution if w[v] > 0]
    return SubResult(sol, res.value, res.bound, res.info)


def _aihp_k2(inst, ctx, solve_sub):
    from .matching import msim_approx
    g, gam, gh = inst.graph, inst.gamma, inst.gamma_h
    ew, orient = {}, {}
    for u, v in sorted(g.black):
        best = None
        for t in ((u, v), (v, u)):
            if gam[t[0]] == gh[0] and gam[t[1]] == gh[1]:
                wt = inst.weights(t)
                if best is None or wt > best[0]:
                    best = (wt, t)
        if best is not None and best[0] > 0:
            ew[(u, v)], orient[(u, v)] = best
    res = msim_approx(MsimInstance(g, frozenset(ew), ew), ctx, solve_sub)
    sol = sorted(orient[_pair(*e)] for e in res.solution)
    return SubResult(sol, sum((ew[_pair(*t)] for t in sol), Fraction(0)), res.bound, res.info)


def _restrict_aihp(inst, verts):
    sub, keep = induced_subtrigraph(inst.graph, verts)
    index = {v: i for i, v in enumerate(keep)}
    gamma = tuple(inst.gamma[v] for v in keep)
    return AihpInstance(sub, inst.pattern, inst.weights.restrict(index), gamma, inst.gamma_h), keep


def aihp_approx(inst: AihpInstance, ctx, solve_sub) -> SubResult:
    H = inst.pattern
    cap = getattr(solve_sub, "regime", None)
    check_pattern(H, cap.h_cap if cap is not None else H_CAP)
    if H.n == 1:
        return _aihp_k1(inst, ctx, solve_sub)
    if H.n == 2:
        return _aihp_k2(inst, ctx, solve_sub)
    g = inst.graph
    Q = ctx.quotient
    T = total_graph(Q)
    parts = ctx.partition.parts
    pmask = [mask_of(p) for p in parts]
    shapes = {ct.key for ct in compatible_trigraphs(H, H.n)}
    groups = {}
    for U in connected_sets(T.black_adj, H.n):
        key = canonical_key(induced_subtrigraph(Q, U)[0])
        if key in shapes:
            groups.setdefault(key, []).append(U)
    best, best_val = [], Fraction(0)
    bound = Fraction(0)
    runs = []
    for key in sorted(groups):
        shape = from_key(key)
        case_a = bool(shape.black)
        cands = []  # (U, copies, value, bound)
        for U in groups[key]:
            verts = sorted(v for i in U for v in parts[i])
            if case_a:
                top, top_w = None, Fraction(0)
                for tup in pattern_copies(g, H, inst.gamma, inst.gamma_h, within=mask_of(verts)):
                    tm = mask_of(tup)
                    if all(tm & pmask[i] for i in U):
                        wt = inst.weights(tup)
                        if wt > top_w:
                            top, top_w = tup, wt
                if top is not None:
                    cands.append((U, [top], top_w, Fraction(1)))
            else:
                sub_inst, keep = _restrict_aihp(inst, verts)
                res = solve_sub("aihp", sub_inst, ctx.matrix_for_induced(verts))
                if res.value > 0:
                    cands.append((U, [tuple(keep[x] for x in t) for t in res.solution], res.value, res.bound))
        if not cands:
            continue
        # candidate part sets sharing a part or joined by a red pair go to different classes
        reach = []
        for U, *_ in cands:
            m = 0
            for i in U:
                m |= (1 << i) | Q.red_adj[i]
            reach.append(m)
        sets = [mask_of(c[0]) for c in cands]
        conf = [0] * len(cands)
        for a in range(len(cands)):
            for b in range(a + 1, len(cands)):
                if reach[a] & sets[b]:
                    conf[a] |= 1 << b
                    conf[b] |= 1 << a
        classes = color_classes(greedy_degeneracy_coloring(conf))
        pattern = total_graph(shape)
        pattern = Trigraph(pattern.n, pattern.black_adj, pattern.red_adj)
        r_sub = max(c[3] for c in cands)
        r_quot = Fraction(1)
        run_best = Fraction(0)
        for C in classes:
            table, owner = {}, {}
            for ci in C:
                U, _, val, _ = cands[ci]
                owner[frozenset(U)] = ci
                for perm in permutations(U):
                    if all(_rel(Q, perm[a], perm[b]) == _rel(shape, a, b)
                           for a, b in combinations(range(len(U)), 2)):
                        table[perm] = val
            qinst = AihpInstance(T, pattern, TupleWeights(table, Fraction(0)))
            res = solve_sub("aihp", qinst, ctx.matrix_for_quotient(range(Q.n)))
            r_quot = max(r_quot, res.bound)
            picked = [owner[frozenset(t)] for t in res.solution if frozenset(t) in owner]
            copies = [t for ci in picked for t in cands[ci][1]]
            val = sum((inst.weights(t) for t in copies), Fraction(0))
            run_best = max(run_best, val)
            if val > best_val:
                best_val, best = val, copies
        rb = len(classes) * r_sub * r_quot
        bound += rb
        runs.append(AihpRun(key, "A" if case_a else "B", len(cands), len(classes), rb, run_best))
    best = sorted(best)
    check_aihp(inst, best)
    return SubResult(best, best_val, max(bound, Fraction(1)), runs)


# -- star forests -------------------------------------------------------------------

@dataclass
class StarTrace:
    parts: list
    branches: list
    complete_pairs: int = 0
    partial_pairs: int = 0


def _lift_stars(keep, stars):
    return [(keep[c], sorted(keep[x] for x in ls)) for c, ls in stars]


def _restrict_star(inst, keep, pred=None):
    index = {v: i for i, v in enumerate(keep)}
    Y = frozenset(_pair(index[u], index[v]) for u, v in inst.Y
                  if u in index and v in index and (pred is None or pred((u, v))))
    return Y


def _star_value(w, stars):
    return sum((Fraction(w[l]) for _, ls in stars for l in ls), Fraction(0))


def mlisf_approx(inst: StarForestInstance, ctx, solve_sub) -> SubResult:
    if ctx is None:
        raise ValueError("mlisf_approx needs a balanced partition context")
    g, w = inst.graph, inst.weights
    Q = ctx.quotient
    parts = ctx.partition.parts
    part_of = ctx.partition.part_of
    groups = {}
    for e in sorted(inst.Y):
        a, b = part_of[e[0]], part_of[e[1]]
        groups.setdefault((min(a, b), max(a, b)), []).append(e)
    useful = {pq for pq, es in groups.items() if any(w[x] > 0 for e in es for x in e)}
    complete, partial = set(), set()
    for (a, b), es in groups.items():
        if a != b and Q.has_black(a, b):
            (complete if len(es) == len(parts[a]) * len(parts[b]) else partial).add((a, b))
    branches = [_star_inside(inst, ctx, solve_sub, useful),
                _star_cross(inst, ctx, solve_sub, useful, partial),
                _star_black(inst, ctx, solve_sub, useful & complete, complete)]
    for b in branches:
        check_star_forest(g, b.solution, inst.Y)
    win = max(branches, key=lambda b: b.value)
    bound = sum((b.bound for b in branches), Fraction(0))
    sol = sorted(win.solution)
    info = StarTrace(list(parts), branches, len(complete), len(partial))
    return SubResult(sol, _star_value(w, sol), max(bound, Fraction(1)), info)


def _star_inside(inst, ctx, solve_sub, useful) -> Branch:
    br = Branch("inside")
    parts = ctx.partition.parts
    if not any(a == b for a, b in useful):
        return br
    sols, vals, r_p = [], [], Fraction(1)
    for i, p in enumerate(parts):
        if (i, i) not in useful:
            sols.append([])
            vals.append(Fraction(0))
            continue
        sub, keep = induced_subtrigraph(inst.graph, p)
        res = solve_sub("mlisf", StarForestInstance(sub, tuple(inst.weights[v] for v in keep),
                                                    _restrict_star(inst, keep)),
                        ctx.matrix_for_induced(p))
        sols.append(_lift_stars(keep, res.solution))
        vals.append(res.value)
        r_p = max(r_p, res.bound)
    classes = color_classes(greedy_degeneracy_coloring(ctx.quotient.red_adj))
    r_q = Fraction(1)
    for C in classes:
        chosen, r = pack_class(ctx, C, vals, solve_sub)
        r_q = max(r_q, r)
        val = sum((vals[i] for i in chosen), Fraction(0))
        if val > br.value:
            br.value = val
            br.solution = sorted(s for i in chosen for s in sols[i])
    br.bound = len(classes) * r_p * r_q
    return br


def _star_cross(inst, ctx, solve_sub, useful, partial) -> Branch:
    """Stars across red pairs and across black pairs only partly inside Y."""
    br = Branch("red")
    Q = ctx.quotient
    parts = ctx.partition.parts
    pairs = sorted(e for e in useful if e[0] != e[1] and (Q.has_red(*e) or e in partial))
    if not pairs:
        return br
    masks = list(Q.red_adj)
    for a, b in partial:
        masks[a] |= 1 << b
        masks[b] |= 1 << a
    colors = distance2_edge_coloring(masks)

    def cross_solve(e):
        i, j = e
        verts = sorted(parts[i] + parts[j])
        sub, keep = induced_subtrigraph(inst.graph, verts)
        Pi = set(parts[i])
        Y = _restrict_star(inst, keep, lambda f: (f[0] in Pi) != (f[1] in Pi))
        res = solve_sub("mlisf", StarForestInstance(sub, tuple(inst.weights[v] for v in keep), Y),
                        ctx.matrix_for_induced(verts))
        return _lift_stars(keep, res.solution), res.value, res.bound

    picked, val, z_used, r_e, r_h = pack_pairs(ctx, pairs, colors, cross_solve, solve_sub)
    br.solution = sorted(s for _, sol in picked for s in sol)
    br.value = val
    br.bound = max(z_used, 1) * r_e * r_h
    br.detail = {"z_colors": len(set(colors.values())), "z_used": z_used}
    return br


def _star_black(inst, ctx, solve_sub, usable, complete) -> Branch:
    """Stars across black pairs whose every cross pair is in Y."""
    br = Branch("black")
    if not usable:
        return br
    g, w = inst.graph, inst.weights
    Q = ctx.quotient
    parts = ctx.partition.parts
    indep, vals, r_i = [], [], Fraction(1)
    for p in parts:
        sub, keep = induced_subtrigraph(g, p)
        res = solve_sub("mis", WmisInstance(sub, tuple(w[v] for v in keep)), ctx.matrix_for_induced(p))
        indep.append(sorted(keep[x] for x in res.solution))
        vals.append(res.value)
        r_i = max(r_i, res.bound)
    Gp = black_graph(Q)
    res = solve_sub("mlisf", StarForestInstance(Gp, tuple(vals), frozenset(complete)),
                    ctx.matrix_for_quotient(range(Q.n)))
    edges = [(c, l) for c, ls in res.solution for l in ls]
    conf = [0] * len(edges)
    for a in range(len(edges)):
        for b in range(a + 1, len(edges)):
            if any(x != y and Q.has_red(x, y) for x in edges[a] for y in edges[b]):
                conf[a] |= 1 << b
                conf[b] |= 1 << a
    classes = color_classes(greedy_degeneracy_coloring(conf))
    for C in classes:
        stars = {}
        for i in C:
            c, l = edges[i]
            if indep[l]:
                stars.setdefault(c, []).extend(indep[l])
        sol = sorted((parts[c][0], sorted(ls)) for c, ls in stars.items())
        val = _star_value(w, sol)
        if val > br.value:
            br.value, br.solution = val, sol
    br.bound = max(len(classes), 1) * r_i * res.bound
    br.detail = {"t_used": len(classes)}
    return br


def mief_approx(inst: StarForestInstance, ctx, solve_sub) -> SubResult:
    """Induced forest with edges in Y: a unit-weight star forest, bound times three."""
    unit = StarForestInstance(inst.graph, tuple(Fraction(1) for _ in range(inst.n)), inst.Y)
    res = mlisf_approx(unit, ctx, solve_sub)
    S = sorted({v for c, ls in res.solution for v in [c, *ls]})
    edges = check_induced_forest(inst.graph, S, inst.Y)
    return SubResult(S, Fraction(edges), 3 * res.bound, res.info)
