"""Set coloring through a balanced partition.

Each part is colored on its own; a part then asks for as many colors in the
quotient as its local solution used, and the quotient coloring is pulled back
through a bijection onto those local colors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coloring import color_classes, greedy_degeneracy_coloring
from .problems import SetColoringInstance
from .recursion import SubResult
from .trigraph import InvalidInput, black_graph, induced_subtrigraph
from .verify import check_set_coloring


@dataclass
class SetColTrace:
    parts: list
    part_demands: list  # b' per part
    classes: list
    class_colors: list


def _compact(palettes):
    """Relabel the colors used to 1..k, keeping their order."""
    used = sorted(set().union(*map(set, palettes))) if palettes else []
    rank = {c: i + 1 for i, c in enumerate(used)}
    return [sorted(rank[c] for c in p) for p in palettes], len(used)


def lift_coloring(parts, c_H, local):
    """Pull a coloring of the parts back to vertices.

    ``c_H[i]`` is the palette of part i, ``local[i]`` lists the palettes of the
    vertices of ``sorted(parts[i])`` in colors 1..b'(P_i). Color x of a part
    becomes the x-th smallest color of its quotient palette. Returns palettes
    indexed by vertex.
    """
    n = max((v for p in parts for v in p), default=-1) + 1
    out = [[] for _ in range(n)]
    for i, p in enumerate(parts):
        need = max((max(pal) for pal in local[i] if pal), default=0)
        tau = sorted(c_H[i])
        if len(tau) < need:
            raise InvalidInput(f"part {i} needs {need} colors but its palette has {len(tau)}")
        for v, pal in zip(sorted(p), local[i]):
            out[v] = sorted(tau[x - 1] for x in pal)
    return out


def set_coloring_approx(inst: SetColoringInstance, ctx, solve_sub) -> SubResult:
    if ctx is None:
        raise ValueError("set_coloring_approx needs a balanced partition context")
    g = inst.graph
    Q = ctx.quotient
    parts = ctx.partition.parts
    local, bprime, r_parts = [], [], Fraction(1)
    for p in parts:
        sub, keep = induced_subtrigraph(g, p)
        res = solve_sub("setcol", SetColoringInstance(sub, tuple(inst.demand[v] for v in keep)),
                        ctx.matrix_for_induced(p))
        pal, k = _compact(res.solution)
        local.append(pal)
        bprime.append(k)
        r_parts = max(r_parts, res.bound)
    classes = color_classes(greedy_degeneracy_coloring(Q.red_adj))
    c_H = [None] * len(parts)
    offset = 0
    r_sum = Fraction(0)
    class_colors = []
    for C in classes:
        Hg, keep = induced_subtrigraph(black_graph(Q), C)
        res = solve_sub("setcol", SetColoringInstance(Hg, tuple(bprime[i] for i in keep)),
                        ctx.matrix_for_quotient(C))
        r_sum += res.bound
        pal, k = _compact(res.solution)
        class_colors.append(k)
        for x, i in enumerate(keep):
            c_H[i] = [offset + c for c in pal[x]]
        offset += k
    palettes = lift_coloring(parts, c_H, local)
    k = check_set_coloring(g, inst.demand, palettes)
    info = SetColTrace(list(parts), bprime, classes, class_colors)
    return SubResult(palettes, Fraction(k), r_parts * r_sum, info)
