"""Independent feasibility checkers and objective evaluators.

Every checker raises Infeasible with a reason; the ``*_value`` helpers
re-evaluate objectives from scratch.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .trigraph import Trigraph, _pair


class Infeasible(AssertionError):
    pass


def check_independent(g: Trigraph, S) -> None:
    S = list(S)
    if len(set(S)) != len(S):
        raise Infeasible("repeated vertex")
    for u, v in combinations(S, 2):
        if g.has_black(u, v) or g.has_red(u, v):
            raise Infeasible(f"{u}-{v} is an edge")


def wmis_value(weights, S) -> Fraction:
    return sum((Fraction(weights[v]) for v in S), Fraction(0))


def check_set_coloring(g: Trigraph, demand, palettes) -> int:
    if len(palettes) != g.n:
        raise Infeasible("palette list length differs from n")
    for v in range(g.n):
        if len(set(palettes[v])) < demand[v]:
            raise Infeasible(f"vertex {v} gets {len(set(palettes[v]))} < {demand[v]} colors")
    for u, v in g.black:
        if set(palettes[u]) & set(palettes[v]):
            raise Infeasible(f"edge {u}-{v} shares colors")
    return len(set().union(*map(set, palettes))) if palettes else 0


def check_induced_matching(g: Trigraph, M, Y) -> None:
    M = [_pair(*e) for e in M]
    seen = set()
    for e in M:
        if e not in Y:
            raise Infeasible(f"{e} not in the prescribed set")
        if not g.has_black(*e):
            raise Infeasible(f"{e} is not an edge")
        if seen & set(e):
            raise Infeasible(f"{e} shares a vertex")
        seen.update(e)
    for e, f in combinations(M, 2):
        for x in e:
            for y in f:
                if g.has_black(x, y):
                    raise Infeasible(f"edge {x}-{y} joins {e} and {f}")


def matching_value(inst, M) -> Fraction:
    return sum((inst.w(e) for e in M), Fraction(0))


def check_star_forest(g: Trigraph, stars, Y) -> None:
    verts = []
    star_edges = set()
    for root, leaves in stars:
        if not leaves:
            raise Infeasible(f"star at {root} has no leaf")
        verts.append(root)
        verts.extend(leaves)
        for l in leaves:
            e = _pair(root, l)
            if e not in Y:
                raise Infeasible(f"{e} not in the prescribed set")
            star_edges.add(e)
    if len(set(verts)) != len(verts):
        raise Infeasible("stars are not vertex-disjoint")
    for u, v in combinations(verts, 2):
        if g.has_black(u, v) and _pair(u, v) not in star_edges:
            raise Infeasible(f"extra edge {u}-{v} among solution vertices")
        if g.has_red(u, v):
            raise Infeasible(f"red pair {u}-{v}")
    for e in star_edges:
        if not g.has_black(*e):
            raise Infeasible(f"{e} is not an edge")


def star_value(weights, stars) -> Fraction:
    return sum((Fraction(weights[l]) for _, leaves in stars for l in leaves), Fraction(0))


def star_edges(stars) -> int:
    return sum(len(leaves) for _, leaves in stars)


def check_induced_forest(g: Trigraph, S, Y) -> int:
    """G[S] acyclic with all its edges in Y; returns its edge count."""
    S = sorted(set(S))
    edges = [(u, v) for u, v in combinations(S, 2) if g.has_black(u, v)]
    parent = {v: v for v in S}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        if (u, v) not in Y:
            raise Infeasible(f"{(u, v)} not in the prescribed set")
        a, b = find(u), find(v)
        if a == b:
            raise Infeasible("induced subgraph has a cycle")
        parent[a] = b
    return len(edges)


def check_aihp(inst, copies) -> None:
    g, H = inst.graph, inst.pattern
    used = []
    for tup in copies:
        if len(tup) != H.n:
            raise Infeasible(f"copy {tup} has wrong size")
        for x in range(H.n):
            if inst.gamma[tup[x]] != inst.gamma_h[x]:
                raise Infeasible(f"label mismatch at {tup[x]}")
        for x, y in combinations(range(H.n), 2):
            if g.has_red(tup[x], tup[y]):
                raise Infeasible("red pair inside copy")
            if g.has_black(tup[x], tup[y]) != H.has_black(x, y):
                raise Infeasible(f"copy {tup} is not an induced image of the pattern")
        used.append(tup)
    flat = [v for t in used for v in t]
    if len(set(flat)) != len(flat):
        raise Infeasible("copies overlap")
    for s, t in combinations(used, 2):
        for x in s:
            for y in t:
                if g.has_black(x, y) or g.has_red(x, y):
                    raise Infeasible(f"edge {x}-{y} joins two copies")


def aihp_value(inst, copies) -> Fraction:
    return sum((inst.weights(t) for t in copies), Fraction(0))


def check_solution(problem: str, inst, sol) -> Fraction:
    """Verify ``sol`` for ``inst`` from scratch and return its objective value."""
    g = inst.graph
    if problem == "mis":
        check_independent(g, sol)
        return wmis_value(inst.weights, sol)
    if problem == "setcol":
        return Fraction(check_set_coloring(g, inst.demand, sol))
    if problem == "msim":
        check_induced_matching(g, sol, inst.Y)
        return matching_value(inst, sol)
    if problem == "mlisf":
        check_star_forest(g, sol, inst.Y)
        return star_value(inst.weights, sol)
    if problem == "mief":
        return Fraction(check_induced_forest(g, sol, inst.Y))
    if problem == "aihp":
        check_aihp(inst, sol)
        return aihp_value(inst, sol)
    raise ValueError(f"unknown problem {problem!r}")
