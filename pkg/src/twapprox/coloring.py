"""Greedy colorings used to split quotients into red-independent classes."""

from __future__ import annotations

from itertools import combinations

from .trigraph import Trigraph, iter_bits


def _masks(g):
    if isinstance(g, Trigraph):
        return list(g.black_adj)
    return list(g)


def degeneracy_order(masks) -> list[int]:
    """Smallest-last order: repeatedly strip a min-degree vertex (lowest id on ties)."""
    masks = _masks(masks)
    n = len(masks)
    alive = (1 << n) - 1
    deg = [m.bit_count() for m in masks]
    out = []
    for _ in range(n):
        v = min((x for x in iter_bits(alive)), key=lambda x: (deg[x], x))
        out.append(v)
        alive &= ~(1 << v)
        for u in iter_bits(masks[v] & alive):
            deg[u] -= 1
    return out


def greedy_color_masks(masks, order=None) -> list[int]:
    """First-fit coloring in ``order``; colors are 0-based."""
    masks = _masks(masks)
    n = len(masks)
    order = range(n) if order is None else order
    col = [-1] * n
    for v in order:
        taken = {col[u] for u in iter_bits(masks[v]) if col[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        col[v] = c
    return col


def greedy_degeneracy_coloring(g) -> list[int]:
    """Color vertices last-removed first; uses at most degeneracy+1 <= max degree+1 colors.

    ``g`` is a Trigraph (its black graph is colored) or a list of adjacency masks.
    """
    masks = _masks(g)
    return greedy_color_masks(masks, list(reversed(degeneracy_order(masks))))


def color_classes(col) -> list[list[int]]:
    k = max(col) + 1 if col else 0
    out = [[] for _ in range(k)]
    for v, c in enumerate(col):
        out[c].append(v)
    return out


def distance2_edge_coloring(g) -> dict:
    """Greedy strong edge coloring of the black graph of ``g``.

    Two edges clash when they share an endpoint or an edge joins them, so each
    color class is an induced matching. Edges are colored in lexicographic
    order, which keeps the count within 2*D*(D-1)+1 for max degree D.
    """
    masks = _masks(g)
    edges = sorted((u, v) for u in range(len(masks)) for v in iter_bits(masks[u]) if u < v)
    closed = [m | (1 << v) for v, m in enumerate(masks)]
    col = {}
    by_vertex = {}
    for e in edges:
        u, v = e
        reach = closed[u] | closed[v]
        taken = set()
        for x in iter_bits(reach):
            for f in by_vertex.get(x, ()):
                taken.add(col[f])
        c = 0
        while c in taken:
            c += 1
        col[e] = c
        by_vertex.setdefault(u, []).append(e)
        by_vertex.setdefault(v, []).append(e)
    return col


def is_strong_edge_coloring(g, col) -> bool:
    masks = _masks(g)
    for e, f in combinations(sorted(col), 2):
        if col[e] != col[f]:
            continue
        if set(e) & set(f):
            return False
        if any(masks[x] >> y & 1 for x in e for y in f):
            return False
    return True
