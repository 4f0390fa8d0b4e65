"""Neatly divided 0,1,r matrices and the balanced sqrt(n)-part partition built on them.

Entries: 0, 1, and R=2 for the error symbol. A division is symmetric, so a
single list of part starts describes both row and column parts. ``vmap[i]``
is the vertex of the conform trigraph sitting at row/column i.
"""

from __future__ import annotations

import math
from functools import cached_property
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .contraction import ContractionSequence, leaf_order, partition_at, verify_sequence
from .trigraph import InvalidInput, Trigraph, VertexPartition, iter_bits, quotient

R = 2


class CoarseningStalled(RuntimeError):
    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True, eq=False)
class NeatlyDividedMatrix:
    M: np.ndarray
    starts: tuple
    vmap: tuple

    def __post_init__(self):
        k = self.M.shape[0]
        if self.M.shape != (k, k):
            raise InvalidInput("matrix must be square")
        if len(self.vmap) != k:
            raise InvalidInput("vertex map length differs from matrix size")
        st = self.starts
        if k == 0:
            if tuple(st) not in ((0,), ()):
                raise InvalidInput("bad division for empty matrix")
        elif st[0] != 0 or st[-1] != k or any(a >= b for a, b in zip(st, st[1:])):
            raise InvalidInput(f"bad division {st} for size {k}")

    @property
    def size(self) -> int:
        return self.M.shape[0]

    @property
    def nparts(self) -> int:
        return max(len(self.starts) - 1, 0)

    def part_sizes(self) -> list[int]:
        return [b - a for a, b in zip(self.starts, self.starts[1:])]

    def part_size(self) -> int:
        return max(self.part_sizes(), default=0)

    def parts(self) -> list[range]:
        return [range(a, b) for a, b in zip(self.starts, self.starts[1:])]

    def is_symmetric(self) -> bool:
        return bool((self.M == self.M.T).all())

    def trigraph(self) -> Trigraph:
        """Trigraph read off the matrix, vertex i = row i (diagonal ignored)."""
        k = self.size
        black = [0] * k
        red = [0] * k
        for i in range(k):
            row = self.M[i]
            for j in np.nonzero(row == 1)[0]:
                if j != i:
                    black[i] |= 1 << int(j)
            for j in np.nonzero(row == R)[0]:
                if j != i:
                    red[i] |= 1 << int(j)
        return Trigraph(k, tuple(black), tuple(red))


def _starts_array(starts):
    return np.asarray(starts, dtype=np.int64)


def matrix_of(g: Trigraph, order: Sequence[int] | None = None) -> NeatlyDividedMatrix:
    """Adjacency matrix of ``g`` in the given vertex order with the finest division."""
    order = list(range(g.n)) if order is None else list(order)
    k = len(order)
    pos = np.full(g.n, -1, dtype=np.int64)
    for i, v in enumerate(order):
        pos[v] = i
    M = np.zeros((k, k), dtype=np.uint8)
    for i, v in enumerate(order):
        for w in iter_bits(g.black_adj[v]):
            if pos[w] >= 0:
                M[i, pos[w]] = 1
        for w in iter_bits(g.red_adj[v]):
            if pos[w] >= 0:
                M[i, pos[w]] = R
    return NeatlyDividedMatrix(M, tuple(range(k + 1)) if k else (0,), tuple(order))


def finest_conform_matrix(g: Trigraph, seq: ContractionSequence) -> NeatlyDividedMatrix:
    verify_sequence(g, seq)  # raises on malformed sequences
    return matrix_of(g, leaf_order(seq))


def is_conform(N: NeatlyDividedMatrix, g: Trigraph) -> bool:
    """``g`` (on vertices vmap) is a cleanup of the trigraph the matrix encodes."""
    k = N.size
    for i in range(k):
        u = N.vmap[i]
        for j in range(k):
            if i == j:
                continue
            v = N.vmap[j]
            x = N.M[i, j]
            if x == 0 and (g.has_black(u, v) or g.has_red(u, v)):
                return False
            if x == 1 and not g.has_black(u, v):
                return False
    return True


# -- zone statistics ---------------------------------------------------------

def zone_tables(M, starts):
    """(mixed p x p, bad p x p, corners p x (p-1)) for the division ``starts``."""
    st = _starts_array(starts)
    p = len(st) - 1
    mixed = np.zeros((p, p), dtype=bool)
    bad = np.zeros((p, p), dtype=bool)
    corners = np.zeros((p, max(p - 1, 0)), dtype=bool)
    for J in range(p):
        m, b = kernels.zone_column(M, st, int(st[J]), int(st[J + 1]))
        mixed[:, J] = m.astype(bool)
        bad[:, J] = b.astype(bool)
        corners[J] = kernels.row_corners(M, st, int(st[J]), int(st[J + 1])).astype(bool)
    return mixed, bad, corners


def _row_values(mixed, corners):
    if mixed.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    cuts = ~mixed[:, :-1] & ~mixed[:, 1:] & corners
    return mixed.sum(axis=1) + cuts.sum(axis=1)


def validity_violations(N: NeatlyDividedMatrix) -> list[str]:
    out = []
    if not N.is_symmetric():
        out.append("matrix not symmetric")
    if N.size == 0:
        return out
    _, bad, _ = zone_tables(N.M, N.starts)
    for I, J in zip(*np.nonzero(bad)):
        out.append(f"zone ({int(I)},{int(J)}) is neither mixed nor r-free horizontal/vertical")
    return out


def validity_scan(N: NeatlyDividedMatrix) -> bool:
    return not validity_violations(N)


def mixed_values(N: NeatlyDividedMatrix) -> np.ndarray:
    """Mixed value of every row part (column parts agree by symmetry)."""
    if N.size == 0:
        return np.zeros(0, dtype=np.int64)
    mixed, _, corners = zone_tables(N.M, N.starts)
    return _row_values(mixed, corners)


def mixed_value(N: NeatlyDividedMatrix) -> int:
    v = mixed_values(N)
    return int(v.max()) if len(v) else 0


def red_number(N: NeatlyDividedMatrix) -> int:
    if N.size == 0:
        return 0
    isr = N.M == R
    return int(max(isr.sum(axis=0).max(), isr.sum(axis=1).max()))


def coarsen_to(N: NeatlyDividedMatrix, starts) -> NeatlyDividedMatrix:
    """Coarsening onto a given coarser division: bad zones become all-r."""
    M = N.M.copy()
    _, bad, _ = zone_tables(M, starts)
    st = list(starts)
    for I, J in zip(*np.nonzero(bad)):
        M[st[I]:st[I + 1], st[J]:st[J + 1]] = R
    return NeatlyDividedMatrix(M, tuple(st), N.vmap)


def delete_rowcols(N: NeatlyDividedMatrix, S: Iterable[int]) -> NeatlyDividedMatrix:
    drop = set(int(i) for i in S)
    keep = [i for i in range(N.size) if i not in drop]
    M = N.M[np.ix_(keep, keep)].copy() if keep else np.zeros((0, 0), dtype=np.uint8)
    starts = [0]
    for a, b in zip(N.starts, N.starts[1:]):
        cnt = sum(1 for i in range(a, b) if i not in drop)
        if cnt:
            starts.append(starts[-1] + cnt)
    return NeatlyDividedMatrix(M, tuple(starts), tuple(N.vmap[i] for i in keep))


def identical_pairs(N: NeatlyDividedMatrix) -> list[tuple[int, int]]:
    """Disjoint pairs of columns in a common part that agree outside their own two rows."""
    pairs = []
    M = N.M
    k = N.size
    for a0, b0 in zip(N.starts, N.starts[1:]):
        if b0 - a0 < 2:
            continue
        used = set()
        for a in range(a0, b0):
            if a in used:
                continue
            for b in range(a + 1, b0):
                if b in used:
                    continue
                diff = M[:, a] != M[:, b]
                diff[a] = diff[b] = False
                if not diff.any():
                    pairs.append((a, b))
                    used.update((a, b))
                    break
    return pairs


# -- parameters --------------------------------------------------------------

@dataclass
class BalanceParams:
    d_hat: int = 0
    mode: str = "practical"  # practical | theoretical
    mv_cap: int = 8
    ps_cap: int = 4
    red_cap: int | None = None
    c_d_override: Fraction | None = None
    max_loosen: int = 6

    @property
    def d(self) -> int:
        return 2 * self.d_hat + 2

    @property
    def c_d(self) -> Fraction:
        if self.c_d_override is not None:
            return Fraction(self.c_d_override)
        t = self.d
        return Fraction(8, 3) * (t + 1) ** 2 * 2 ** (4 * t)

    @property
    def log2_s(self) -> Fraction:
        return 4 * self.c_d + 4

    @property
    def log2_d_prime(self) -> float:
        return math.log2(self.c_d) + float(self.log2_s)

    def division_caps(self, n: int) -> tuple[int, int]:
        """(mixed-value cap, division part-size cap) actually enforced."""
        if self.mode == "theoretical":
            mv = min(n * n + 1, math.ceil(4 * self.c_d))
            return mv, max(n, 1)
        return self.mv_cap, self.ps_cap

    def group_cap(self, n: int) -> int:
        if self.mode == "theoretical":
            return max(n, 1)
        return max(1, math.floor(self.ps_cap * math.sqrt(n)))

    def describe(self) -> dict:
        return {"d_hat": self.d_hat, "d": self.d, "mode": self.mode, "mv_cap": self.mv_cap,
                "ps_cap": self.ps_cap, "c_d": str(self.c_d), "log2_s": str(self.log2_s),
                "log2_d_prime": self.log2_d_prime}


def parse_caps(spec: str, d_hat: int = 0) -> BalanceParams:
    if spec in (None, "", "practical"):
        return BalanceParams(d_hat=d_hat)
    if spec == "theoretical":
        return BalanceParams(d_hat=d_hat, mode="theoretical")
    mv, ps = 8, 4
    for tok in spec.split(","):
        key, _, val = tok.partition("=")
        try:
            num = int(val)
        except ValueError:
            raise InvalidInput(f"bad caps value {tok!r}") from None
        if num < 1:
            raise InvalidInput("caps must be >= 1")
        if key == "mv":
            mv = num
        elif key == "ps":
            ps = num
        else:
            raise InvalidInput(f"unknown cap {key!r}")
    return BalanceParams(d_hat=d_hat, mv_cap=mv, ps_cap=ps)


# -- coarsening ----------------------------------------------------------------

@dataclass
class CoarsenInfo:
    fusions: int
    mixed_value: int
    part_size: int
    pairs: int


def coarsen_step(N: NeatlyDividedMatrix, mv_cap: int, ps_cap: int):
    """Greedy left-to-right symmetric fusion under the caps, then identical pairs.

    Returns (N', pairs, info). Raises CoarseningStalled when nothing fused and
    no identical pair exists.
    """
    k = N.size
    if k == 0:
        return N, [], CoarsenInfo(0, 0, 0, 0)
    M = N.M.copy()
    starts = list(N.starts)
    mixed, bad, corners = zone_tables(M, starts)
    if bad.any():
        raise InvalidInput("coarsen_step needs a neatly divided input")
    values = _row_values(mixed, corners)
    cap = max(mv_cap, int(values.max()))
    fusions = 0
    j = 0
    while j < len(starts) - 2:
        if starts[j + 2] - starts[j] > ps_cap:
            j += 1
            continue
        ns = starts[:j + 1] + starts[j + 2:]
        c0, c1 = ns[j], ns[j + 1]
        st = _starts_array(ns)
        zm, zb = kernels.zone_column(M, st, c0, c1)
        col = (zm | zb).astype(bool)
        nm = np.delete(np.delete(mixed, j + 1, axis=0), j + 1, axis=1)
        nm[:, j] = col
        nm[j, :] = col
        nc = np.delete(np.delete(corners, j + 1, axis=0), j, axis=1) if corners.shape[1] else corners[:-1]
        nc[j] = kernels.row_corners(M, st, c0, c1).astype(bool)
        nv = _row_values(nm, nc)
        if int(nv.max()) <= cap:
            for I in np.nonzero(zb)[0]:
                r0, r1 = ns[I], ns[I + 1]
                M[r0:r1, c0:c1] = R
                M[c0:c1, r0:r1] = R
            starts, mixed, corners, values = ns, nm, nc, nv
            fusions += 1
        else:
            j += 1
    out = NeatlyDividedMatrix(M, tuple(starts), N.vmap)
    pairs = identical_pairs(out)
    info = CoarsenInfo(fusions, int(values.max()), out.part_size(), len(pairs))
    if not fusions and not pairs:
        raise CoarseningStalled("coarsening stalled: no fusion within caps and no identical columns",
                                {"parts": len(starts) - 1, "mixed_value": int(values.max()),
                                 "mv_cap": mv_cap, "ps_cap": ps_cap})
    return out, pairs, info


# -- balanced partition --------------------------------------------------------

@dataclass
class BalancedPartitionResult:
    graph: Trigraph
    partition: VertexPartition
    achieved_part_size: int
    achieved_red_degree: int
    balance_certified: bool
    source_matrix: NeatlyDividedMatrix | None
    final_matrix: NeatlyDividedMatrix | None
    rounds: int = 0
    loosened: int = 0
    caps_used: tuple = (0, 0)
    trace_lines: list = field(default_factory=list)

    @cached_property
    def quotient(self) -> Trigraph:
        return quotient(self.graph, self.partition)

    def matrix_for_induced(self, vertices: Iterable[int]) -> NeatlyDividedMatrix:
        """Conform matrix for G[vertices]; rows map to indices of the sorted vertex list."""
        keep = sorted(set(vertices))
        src = self.source_matrix
        if src is None:
            from .trigraph import induced_subtrigraph
            sub, _ = induced_subtrigraph(self.graph, keep)
            return matrix_of(sub)
        index = {v: i for i, v in enumerate(keep)}
        drop = [i for i, v in enumerate(src.vmap) if v not in index]
        N = delete_rowcols(src, drop)
        return NeatlyDividedMatrix(N.M, N.starts, tuple(index[v] for v in N.vmap))

    def matrix_for_quotient(self, part_indices: Iterable[int]) -> NeatlyDividedMatrix:
        """Conform matrix for any cleanup of (G/P)[parts]; rows map to sorted part positions."""
        keep = sorted(set(part_indices))
        fin = self.final_matrix
        index = {v: i for i, v in enumerate(keep)}
        drop = [i for i, v in enumerate(fin.vmap) if v not in index]
        N = delete_rowcols(fin, drop)
        return NeatlyDividedMatrix(N.M, N.starts, tuple(index[v] for v in N.vmap))

    def summary(self) -> dict:
        return {"parts": len(self.partition), "achieved_part_size": self.achieved_part_size,
                "achieved_red_degree": self.achieved_red_degree,
                "balance_certified": self.balance_certified, "rounds": self.rounds,
                "loosened": self.loosened, "caps_used": list(self.caps_used),
                "partition": [list(p) for p in self.partition.parts]}


def _finish(g, groups, certified, src, final, rounds, loosened, caps, lines):
    P = VertexPartition.of(groups, g.n)
    q = quotient(g, P)
    return BalancedPartitionResult(g, P, P.max_part_size(), q.max_red_degree(), certified, src, final,
                                   rounds, loosened, caps, lines)


def _fallback_groups(g, groups, target, cap, seq):
    if seq is not None:
        P = partition_at(g, seq, target)
        if P.max_part_size() <= cap:
            return [list(p) for p in P.parts]
    groups = [list(x) for x in groups]
    while len(groups) > target:
        order = sorted(range(len(groups)), key=lambda i: (len(groups[i]), i))
        a, b = sorted(order[:2])
        groups[a] = groups[a] + groups[b]
        del groups[b]
    return groups


def _rebalance(g, groups, max_evals):
    """Move single vertices from largest to smallest parts while the quotient
    red degree does not grow. Every move lowers the sum of squared sizes."""
    groups = [list(x) for x in groups]
    base = quotient(g, VertexPartition.of(groups, g.n)).max_red_degree()
    moved = evals = 0
    while evals < max_evals:
        sizes = [len(x) for x in groups]
        if max(sizes) - min(sizes) < 2:
            break
        done = False
        for a in [i for i, s in enumerate(sizes) if s == max(sizes)]:
            for v in groups[a]:
                for b in [i for i, s in enumerate(sizes) if s == min(sizes)]:
                    evals += 1
                    trial = [x for x in groups]
                    trial[a] = [u for u in groups[a] if u != v]
                    trial[b] = groups[b] + [v]
                    if quotient(g, VertexPartition.of(trial, g.n)).max_red_degree() <= base:
                        groups, done = trial, True
                        break
                if done or evals >= max_evals:
                    break
            if done or evals >= max_evals:
                break
        if not done:
            break
        moved += 1
    return groups, moved


def balanced_partition(g: Trigraph, src=None, params: BalanceParams | None = None,
                       trace: bool = False) -> BalancedPartitionResult:
    """Partition V(g) into floor(sqrt n) parts by contracting identical columns.

    ``src`` is a ContractionSequence, a NeatlyDividedMatrix conform to ``g``,
    or None (the identity-order adjacency matrix is used then).
    """
    params = params or BalanceParams()
    n = g.n
    lines = []
    if n == 0:
        P = VertexPartition((), 0)
        return BalancedPartitionResult(g, P, 0, 0, True, None, None)
    seq = src if isinstance(src, ContractionSequence) else None
    if seq is not None:
        N = finest_conform_matrix(g, seq)
    elif isinstance(src, NeatlyDividedMatrix):
        N = src
    else:
        N = matrix_of(g)
    source = N
    target = math.isqrt(n)
    gcap = params.group_cap(n)
    mv_cap, ps_cap = params.division_caps(n)
    groups = [[v] for v in N.vmap]
    rounds = 0
    loosened = 0
    while len(groups) > target:
        rounds += 1
        try:
            N2, pairs, info = coarsen_step(N, mv_cap, ps_cap)
        except CoarseningStalled:
            N2, pairs, info = N, [], None
        cand = sorted((len(groups[a]) + len(groups[b]), a, b) for a, b in pairs
                      if len(groups[a]) + len(groups[b]) <= gcap)
        if not cand:
            if info is not None and info.fusions:
                N = N2
                continue
            if loosened < params.max_loosen and (mv_cap < n * n or ps_cap < n):
                loosened += 1
                mv_cap, ps_cap = mv_cap * 2, ps_cap * 2
                if trace:
                    lines.append(f"round {rounds} stalled; caps now mv={mv_cap} ps={ps_cap}")
                N = N2
                continue
            if trace:
                lines.append(f"round {rounds} stalled beyond loosening; falling back")
            fg = _fallback_groups(g, groups, target, gcap, seq)
            P = VertexPartition.of(fg, n)
            final = matrix_of(quotient(g, P))
            return _finish(g, fg, False, source, final, rounds, loosened, (mv_cap, ps_cap), lines)
        batch_cap = max(cand[0][0], 2 * math.ceil(n / len(groups)))
        drop = []
        live = len(groups)
        for size, a, b in cand:
            if live <= target or size > batch_cap:
                break
            groups[a] = groups[a] + groups[b]
            groups[b] = None
            drop.append(b)
            live -= 1
        N = delete_rowcols(N2, drop)
        groups = [x for x in groups if x is not None]
        if trace:
            lines.append(f"round {rounds} parts={N.nparts} live={len(groups)} fused={info.fusions} "
                         f"mv={info.mixed_value} pairs={len(pairs)} merged={len(drop)} "
                         f"starts={list(N.starts)}")
    final = NeatlyDividedMatrix(N.M, N.starts, tuple(range(len(groups))))
    groups, moved = _rebalance(g, groups, 4 * n)
    if moved:
        # the coarse matrix no longer matches the parts; the quotient's own matrix is conform
        final = matrix_of(quotient(g, VertexPartition.of(groups, n)))
        if trace:
            lines.append(f"rebalance moved {moved} vertices")
    return _finish(g, groups, True, source, final, rounds, loosened, (mv_cap, ps_cap), lines)
