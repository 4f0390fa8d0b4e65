# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as _kernels_py."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t
from libc.stdlib cimport malloc, free
from libc.string cimport memset, memcpy

cnp.import_array()

BACKEND = "cython"

from ._kernels_py import NodeBudgetExceeded

cdef uint8_t R = 2

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def zone_column(M, starts, Py_ssize_t c0, Py_ssize_t c1):
    cdef const uint8_t[:, :] m = np.ascontiguousarray(M, dtype=np.uint8)
    cdef const int64_t[:] st = np.ascontiguousarray(starts, dtype=np.int64)
    cdef Py_ssize_t p = st.shape[0] - 1
    mixed_a = np.zeros(p, dtype=np.uint8)
    bad_a = np.zeros(p, dtype=np.uint8)
    cdef uint8_t[:] mixed = mixed_a
    cdef uint8_t[:] bad = bad_a
    cdef Py_ssize_t I, i, j, r0, r1
    cdef bint all_r, any_r, horiz, vert
    cdef uint8_t x
    if c1 <= c0:
        return mixed_a, bad_a
    for I in range(p):
        r0 = st[I]
        r1 = st[I + 1]
        all_r = True
        any_r = False
        horiz = True
        vert = True
        for i in range(r0, r1):
            for j in range(c0, c1):
                x = m[i, j]
                if x == R:
                    any_r = True
                else:
                    all_r = False
                if horiz and x != m[i, c0]:
                    horiz = False
                if vert and x != m[r0, j]:
                    vert = False
        mixed[I] = all_r
        bad[I] = (any_r and not all_r) or (not any_r and not horiz and not vert)
    return mixed_a, bad_a


def row_corners(M, starts, Py_ssize_t r0, Py_ssize_t r1):
    cdef const uint8_t[:, :] m = np.ascontiguousarray(M, dtype=np.uint8)
    cdef const int64_t[:] st = np.ascontiguousarray(starts, dtype=np.int64)
    cdef Py_ssize_t p = st.shape[0] - 1
    cdef Py_ssize_t nb = p - 1 if p > 1 else 0
    out_a = np.zeros(nb, dtype=np.uint8)
    cdef uint8_t[:] out = out_a
    cdef Py_ssize_t b, i, a, c
    cdef bint horiz, vert
    if p < 2 or r1 - r0 < 2:
        return out_a
    for b in range(nb):
        c = st[b + 1]
        a = c - 1
        horiz = True
        vert = True
        for i in range(r0, r1):
            if m[i, a] != m[i, c]:
                horiz = False
            if m[i, a] != m[r0, a] or m[i, c] != m[r0, c]:
                vert = False
        out[b] = (not horiz) and (not vert)
    return out_a


cdef struct Search:
    int n
    int W
    uint64_t* adj        # n * W
    int64_t* w
    int* order
    uint64_t* cand_stack # (n + 2) * W
    uint64_t* cur_stack  # (n + 2) * W
    uint64_t* best
    uint64_t* cliques    # n * W scratch
    int64_t* clique_w
    int64_t best_w
    long long nodes
    long long budget
    bint blown


cdef inline bint test(const uint64_t* s, int v) nogil:
    return (s[v >> 6] >> (v & 63)) & 1


cdef inline bint empty(const uint64_t* s, int W) nogil:
    cdef int k
    for k in range(W):
        if s[k]:
            return False
    return True


cdef int64_t cover_bound(Search* S, const uint64_t* cand) nogil:
    cdef int nc = 0
    cdef int t, v, i, k
    cdef bint fits
    cdef int64_t total = 0
    cdef int W = S.W
    cdef uint64_t* cm
    cdef const uint64_t* av
    for t in range(S.n):
        v = S.order[t]
        if not test(cand, v):
            continue
        av = S.adj + v * W
        for i in range(nc):
            cm = S.cliques + i * W
            fits = True
            for k in range(W):
                if cm[k] & ~av[k]:
                    fits = False
                    break
            if fits:
                cm[v >> 6] |= (<uint64_t>1) << (v & 63)
                break
        else:
            cm = S.cliques + nc * W
            memset(cm, 0, W * sizeof(uint64_t))
            cm[v >> 6] |= (<uint64_t>1) << (v & 63)
            nc += 1
            total += S.w[v]
    return total


cdef int popcount_and(const uint64_t* a, const uint64_t* b, int W) nogil:
    cdef int k, c = 0
    for k in range(W):
        c += __builtin_popcountll(a[k] & b[k])
    return c


cdef void rec(Search* S, int depth, int64_t cur_w) nogil:
    cdef int W = S.W
    cdef uint64_t* cand = S.cand_stack + depth * W
    cdef uint64_t* cur = S.cur_stack + depth * W
    cdef uint64_t* ncand
    cdef uint64_t* ncur
    cdef int v, k, bv, bd, d
    cdef const uint64_t* av
    cdef bint isolated
    S.nodes += 1
    if S.nodes > S.budget:
        S.blown = True
        return
    # absorb vertices isolated inside cand (scan against the original cand)
    for k in range(W):
        S.cliques[k] = 0  # reuse first scratch row as the isolated mask
    for v in range(S.n):
        if test(cand, v):
            av = S.adj + v * W
            isolated = True
            for k in range(W):
                if av[k] & cand[k]:
                    isolated = False
                    break
            if isolated:
                S.cliques[v >> 6] |= (<uint64_t>1) << (v & 63)
    for v in range(S.n):
        if test(S.cliques, v):
            cur_w += S.w[v]
    for k in range(W):
        cur[k] |= S.cliques[k]
        cand[k] &= ~S.cliques[k]
    if empty(cand, W):
        if cur_w > S.best_w:
            S.best_w = cur_w
            memcpy(S.best, cur, W * sizeof(uint64_t))
        return
    if cur_w + cover_bound(S, cand) <= S.best_w:
        return
    bv = -1
    bd = -1
    for v in range(S.n):
        if test(cand, v):
            d = popcount_and(S.adj + v * W, cand, W)
            if d > bd:
                bd = d
                bv = v
    av = S.adj + bv * W
    ncand = S.cand_stack + (depth + 1) * W
    ncur = S.cur_stack + (depth + 1) * W
    for k in range(W):
        ncand[k] = cand[k] & ~av[k]
        ncur[k] = cur[k]
    ncand[bv >> 6] &= ~((<uint64_t>1) << (bv & 63))
    ncur[bv >> 6] |= (<uint64_t>1) << (bv & 63)
    rec(S, depth + 1, cur_w + S.w[bv])
    if S.blown:
        return
    for k in range(W):
        ncand[k] = cand[k]
        ncur[k] = cur[k]
    ncand[bv >> 6] &= ~((<uint64_t>1) << (bv & 63))
    rec(S, depth + 1, cur_w)


def mis_bnb(int n, adj, weights, long long budget):
    cdef int W = (n + 63) // 64 if n > 0 else 1
    cdef Search S
    cdef int v, k, t
    cdef object a
    S.n = n
    S.W = W
    S.adj = <uint64_t*> malloc(max(n, 1) * W * sizeof(uint64_t))
    S.w = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    S.order = <int*> malloc(max(n, 1) * sizeof(int))
    S.cand_stack = <uint64_t*> malloc((n + 2) * W * sizeof(uint64_t))
    S.cur_stack = <uint64_t*> malloc((n + 2) * W * sizeof(uint64_t))
    S.best = <uint64_t*> malloc(W * sizeof(uint64_t))
    S.cliques = <uint64_t*> malloc(max(n, 1) * W * sizeof(uint64_t))
    S.clique_w = NULL
    try:
        memset(S.cand_stack, 0, (n + 2) * W * sizeof(uint64_t))
        memset(S.cur_stack, 0, (n + 2) * W * sizeof(uint64_t))
        memset(S.best, 0, W * sizeof(uint64_t))
        for v in range(n):
            a = adj[v]
            for k in range(W):
                S.adj[v * W + k] = <uint64_t>((a >> (64 * k)) & 0xFFFFFFFFFFFFFFFF)
            S.w[v] = weights[v]
            if weights[v] > 0:
                S.cand_stack[v >> 6] |= (<uint64_t>1) << (v & 63)
        for t, v in enumerate(sorted(range(n), key=lambda x: (-weights[x], x))):
            S.order[t] = v
        S.best_w = 0
        S.nodes = 0
        S.budget = budget
        S.blown = False
        with nogil:
            rec(&S, 0, 0)
        if S.blown:
            raise NodeBudgetExceeded(f"independent set search exceeded {budget} nodes")
        mask = 0
        for k in range(W):
            mask |= (<object>S.best[k]) << (64 * k)
        return mask, S.best_w, S.nodes
    finally:
        free(S.adj); free(S.w); free(S.order); free(S.cand_stack)
        free(S.cur_stack); free(S.best); free(S.cliques)
