"""Pure-Python kernels. The compiled twin in _kernels.pyx must agree bit for bit."""

import numpy as np

R = 2  # the error symbol in 0,1,r matrices

BACKEND = "python"


class NodeBudgetExceeded(RuntimeError):
    pass


def zone_column(M, starts, c0, c1):
    """Per row part: (mixed, bad) flags of the zone with columns c0:c1.

    mixed = all entries r; bad = some r but not all, or r-free and neither
    horizontal nor vertical.
    """
    M = np.asarray(M)
    starts = np.asarray(starts, dtype=np.int64)
    p = len(starts) - 1
    mixed = np.zeros(p, dtype=np.uint8)
    bad = np.zeros(p, dtype=np.uint8)
    if c1 <= c0:
        return mixed, bad
    block = M[:, c0:c1]
    isr = block == R
    k = M.shape[0]
    if k == 0:
        return mixed, bad
    st = starts[:-1]
    all_r = np.logical_and.reduceat(isr.all(axis=1), st)
    any_r = np.logical_or.reduceat(isr.any(axis=1), st)
    rowconst = (block == block[:, :1]).all(axis=1)
    horiz = np.logical_and.reduceat(rowconst, st)
    firsts = np.repeat(st, np.diff(starts))
    samerow = (block == block[firsts]).all(axis=1)
    vert = np.logical_and.reduceat(samerow, st)
    mixed[:] = all_r
    bad[:] = (any_r & ~all_r) | (~any_r & ~horiz & ~vert)
    return mixed, bad


def row_corners(M, starts, r0, r1):
    """For rows r0:r1, whether the two columns around each part boundary hold a 0,1-corner.

    Entry b refers to the boundary between column parts b and b+1.
    Only meaningful where both adjacent zones are r-free.
    """
    M = np.asarray(M)
    starts = np.asarray(starts, dtype=np.int64)
    p = len(starts) - 1
    out = np.zeros(max(p - 1, 0), dtype=np.uint8)
    if p < 2 or r1 - r0 < 2:
        return out
    b = starts[1:-1]
    left = M[r0:r1, b - 1]
    right = M[r0:r1, b]
    horiz = (left == right).all(axis=0)
    vert = (left == left[:1]).all(axis=0) & (right == right[:1]).all(axis=0)
    out[:] = ~horiz & ~vert
    return out


def mis_bnb(n, adj, weights, budget):
    """Maximum-weight independent set by branch and bound.

    ``adj`` is a list of int bitmasks, ``weights`` non-negative ints.
    Returns (mask, weight, nodes). Raises NodeBudgetExceeded past ``budget`` nodes.
    """
    order = sorted(range(n), key=lambda v: (-weights[v], v))
    best = [0, 0]  # weight, mask
    nodes = [0]
    cand0 = 0
    for v in range(n):
        if weights[v] > 0:
            cand0 |= 1 << v

    def bound(cand):
        # greedy weighted clique cover in (weight desc, index) order
        total = 0
        cliques = []
        for v in order:
            if not cand >> v & 1:
                continue
            for i, cm in enumerate(cliques):
                if cm & ~adj[v] == 0:
                    cliques[i] = cm | (1 << v)
                    break
            else:
                cliques.append(1 << v)
                total += weights[v]
        return total

    def rec(cand, cur_w, cur):
        nodes[0] += 1
        if nodes[0] > budget:
            raise NodeBudgetExceeded(f"independent set search exceeded {budget} nodes")
        # absorb vertices isolated inside cand
        iso = 0
        m = cand
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            if adj[v] & cand == 0:
                iso |= low
        if iso:
            cand &= ~iso
            cur |= iso
            m = iso
            while m:
                low = m & -m
                cur_w += weights[low.bit_length() - 1]
                m ^= low
        if cand == 0:
            if cur_w > best[0]:
                best[0] = cur_w
                best[1] = cur
            return
        if cur_w + bound(cand) <= best[0]:
            return
        # branch on the max-degree vertex, lowest index on ties
        bv = -1
        bd = -1
        m = cand
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            d = (adj[v] & cand).bit_count()
            if d > bd:
                bd = d
                bv = v
        bit = 1 << bv
        rec(cand & ~adj[bv] & ~bit, cur_w + weights[bv], cur | bit)
        rec(cand & ~bit, cur_w, cur)

    rec(cand0, 0, 0)
    return best[1], best[0], nodes[0]
