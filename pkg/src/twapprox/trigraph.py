"""Trigraphs, vertex partitions, and the quotient/cleanup calculus.

A trigraph is stored as two lists of neighbourhood bitmasks (black and red),
which gives O(1) pair lookup and fast neighbourhood intersection at the sizes
this package targets (up to a few thousand vertices).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class InvalidInput(ValueError):
    """Malformed graph, partition, or file contents."""


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass(frozen=True, eq=False)
class Trigraph:
    n: int
    black_adj: tuple[int, ...]
    red_adj: tuple[int, ...]
    labels: tuple | None = field(default=None)

    @classmethod
    def from_edges(cls, n: int, black: Iterable[Sequence[int]] = (), red: Iterable[Sequence[int]] = (),
                   labels: Sequence | None = None) -> "Trigraph":
        if n < 0:
            raise InvalidInput(f"negative vertex count {n}")
        b = [0] * n
        r = [0] * n
        for kind, edges, adj in (("black", black, b), ("red", red, r)):
            for e in edges:
                u, v = int(e[0]), int(e[1])
                if u == v:
                    raise InvalidInput(f"self-loop on vertex {u}")
                if not (0 <= u < n and 0 <= v < n):
                    raise InvalidInput(f"{kind} edge {u}-{v} out of range for n={n}")
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        for u in range(n):
            if b[u] & r[u]:
                w = (b[u] & r[u]).bit_length() - 1
                raise InvalidInput(f"pair {u}-{w} is both black and red")
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise InvalidInput("label count does not match vertex count")
        return cls(n, tuple(b), tuple(r), labels)

    @classmethod
    def from_masks(cls, black_adj: Sequence[int], red_adj: Sequence[int] | None = None,
                   labels: Sequence | None = None) -> "Trigraph":
        n = len(black_adj)
        red_adj = tuple(red_adj) if red_adj is not None else (0,) * n
        return cls(n, tuple(black_adj), red_adj, tuple(labels) if labels is not None else None)

    @classmethod
    def empty(cls, n: int) -> "Trigraph":
        return cls(n, (0,) * n, (0,) * n)

    # -- basic queries -----------------------------------------------------

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def black(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u in range(self.n) for v in iter_bits(self.black_adj[u]) if u < v)

    @cached_property
    def red(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u in range(self.n) for v in iter_bits(self.red_adj[u]) if u < v)

    @property
    def is_graph(self) -> bool:
        return not any(self.red_adj)

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Sorted black edges; the edge list of a graph."""
        return sorted(self.black)

    def has_black(self, u: int, v: int) -> bool:
        return bool(self.black_adj[u] >> v & 1)

    def has_red(self, u: int, v: int) -> bool:
        return bool(self.red_adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.black_adj[v].bit_count()

    def red_degree(self, v: int) -> int:
        return self.red_adj[v].bit_count()

    def max_red_degree(self) -> int:
        return max((m.bit_count() for m in self.red_adj), default=0)

    def max_degree(self) -> int:
        return max((m.bit_count() for m in self.black_adj), default=0)

    def total_adj(self, v: int) -> int:
        return self.black_adj[v] | self.red_adj[v]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trigraph):
            return NotImplemented
        return self.n == other.n and self.black_adj == other.black_adj and self.red_adj == other.red_adj

    def __hash__(self) -> int:
        return hash((self.n, self.black_adj, self.red_adj))

    def __repr__(self) -> str:
        return f"Trigraph(n={self.n}, black={sorted(self.black)}, red={sorted(self.red)})"


@dataclass(frozen=True)
class VertexPartition:
    parts: tuple[tuple[int, ...], ...]
    n: int

    @classmethod
    def of(cls, parts: Iterable[Iterable[int]], n: int | None = None) -> "VertexPartition":
        parts = tuple(tuple(sorted(p)) for p in parts)
        if n is None:
            n = sum(len(p) for p in parts)
        seen = [False] * n
        for p in parts:
            if not p:
                raise InvalidInput("empty part in partition")
            for v in p:
                if not 0 <= v < n:
                    raise InvalidInput(f"partition vertex {v} out of range for n={n}")
                if seen[v]:
                    raise InvalidInput(f"vertex {v} appears in two parts")
                seen[v] = True
        if not all(seen):
            missing = seen.index(False)
            raise InvalidInput(f"partition misses vertex {missing}")
        if n > 0 and not parts:
            raise InvalidInput("partition of a nonempty set needs at least one part")
        return cls(parts, n)

    @classmethod
    def singletons(cls, n: int) -> "VertexPartition":
        return cls(tuple((v,) for v in range(n)), n)

    @cached_property
    def part_of(self) -> tuple[int, ...]:
        out = [0] * self.n
        for i, p in enumerate(self.parts):
            for v in p:
                out[v] = i
        return tuple(out)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(mask_of(p) for p in self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def max_part_size(self) -> int:
        return max((len(p) for p in self.parts), default=0)

    def as_sets(self) -> set[frozenset[int]]:
        return {frozenset(p) for p in self.parts}


def quotient(g: Trigraph, partition: VertexPartition) -> Trigraph:
    """The quotient trigraph G/P; output vertex i is ``partition.parts[i]``."""
    if partition.n != g.n:
        raise InvalidInput(f"partition covers {partition.n} vertices, trigraph has {g.n}")
    masks = partition.masks
    k = len(masks)
    # per part: union of black/red neighbourhoods and intersection of black ones
    any_black = []
    all_black = []
    any_red = []
    for p in partition.parts:
        ub = 0
        ib = -1
        ur = 0
        for v in p:
            ub |= g.black_adj[v]
            ib &= g.black_adj[v]
            ur |= g.red_adj[v]
        any_black.append(ub)
        all_black.append(ib)
        any_red.append(ur)
    black = [0] * k
    red = [0] * k
    for i in range(k):
        for j in range(i + 1, k):
            mj = masks[j]
            if any_red[i] & mj:
                is_red = True
            elif all_black[i] & mj == mj:
                black[i] |= 1 << j
                black[j] |= 1 << i
                continue
            else:
                is_red = bool(any_black[i] & mj)
            if is_red:
                red[i] |= 1 << j
                red[j] |= 1 << i
    return Trigraph(k, tuple(black), tuple(red))


BLACK, ABSENT, KEEP_RED = "black", "absent", "keep-red"


def cleanup(g: Trigraph, resolution: Mapping[tuple[int, int], str]) -> Trigraph:
    """Resolve red edges to black edges or non-edges; unlisted red edges stay red."""
    black = list(g.black_adj)
    red = list(g.red_adj)
    for (u, v), how in resolution.items():
        if not g.has_red(u, v):
            raise InvalidInput(f"{u}-{v} is not a red edge")
        if how == KEEP_RED:
            continue
        if how not in (BLACK, ABSENT):
            raise InvalidInput(f"unknown resolution {how!r}")
        red[u] &= ~(1 << v)
        red[v] &= ~(1 << u)
        if how == BLACK:
            black[u] |= 1 << v
            black[v] |= 1 << u
    return Trigraph(g.n, tuple(black), tuple(red), g.labels)


def total_graph(g: Trigraph) -> Trigraph:
    return Trigraph(g.n, tuple(b | r for b, r in zip(g.black_adj, g.red_adj)), (0,) * g.n, g.labels)


def black_graph(g: Trigraph) -> Trigraph:
    return Trigraph(g.n, g.black_adj, (0,) * g.n, g.labels)


def red_graph(g: Trigraph) -> Trigraph:
    return Trigraph(g.n, g.red_adj, (0,) * g.n, g.labels)


@dataclass(frozen=True)
class Views:
    red_graph: Trigraph
    black_graph: Trigraph
    total_graph: Trigraph


def views(g: Trigraph) -> Views:
    return Views(red_graph(g), black_graph(g), total_graph(g))


def induced_subtrigraph(g: Trigraph, vertices: Iterable[int]) -> tuple[Trigraph, tuple[int, ...]]:
    """Restrict to ``vertices``; returns the subtrigraph and new-index -> old-index map."""
    keep = sorted(set(vertices))
    for v in keep:
        if not 0 <= v < g.n:
            raise InvalidInput(f"vertex {v} out of range for n={g.n}")
    index = {v: i for i, v in enumerate(keep)}
    kmask = mask_of(keep)

    def remap(m: int) -> int:
        out = 0
        for w in iter_bits(m & kmask):
            out |= 1 << index[w]
        return out

    black = tuple(remap(g.black_adj[v]) for v in keep)
    red = tuple(remap(g.red_adj[v]) for v in keep)
    labels = tuple(g.labels[v] for v in keep) if g.labels is not None else None
    return Trigraph(len(keep), black, red, labels), tuple(keep)


def induced_subgraph(g: Trigraph, vertices: Iterable[int]) -> Trigraph:
    return induced_subtrigraph(g, vertices)[0]


def relabel(g: Trigraph, order: Sequence[int]) -> Trigraph:
    """Vertex ``i`` of the result is vertex ``order[i]`` of ``g``."""
    sub, _ = induced_subtrigraph(g, order)
    # induced_subtrigraph sorts; rebuild in the requested order
    pos = {v: i for i, v in enumerate(order)}
    black = [0] * len(order)
    red = [0] * len(order)
    for i, v in enumerate(order):
        for w in iter_bits(g.black_adj[v]):
            if w in pos:
                black[i] |= 1 << pos[w]
        for w in iter_bits(g.red_adj[v]):
            if w in pos:
                red[i] |= 1 << pos[w]
    return Trigraph(len(order), tuple(black), tuple(red))


# -- text format -------------------------------------------------------------

def parse_tgf(text: str) -> tuple[Trigraph, dict[str, list[tuple]]]:
    """Parse ``tgf <n>`` text.

    Returns the trigraph and every non-edge record grouped by keyword
    (``w``, ``d``, ``ew``, ``y``, ``g``, ``gh``, ``tw``) as raw token tuples.
    """
    n = None
    black: list[tuple[int, int]] = []
    red: list[tuple[int, int]] = []
    extra: dict[str, list[tuple]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key = tok[0]
        if n is None:
            if key != "tgf" or len(tok) != 2:
                raise InvalidInput(f"line {lineno}: expected header 'tgf <n>'")
            try:
                n = int(tok[1])
            except ValueError:
                raise InvalidInput(f"line {lineno}: bad vertex count {tok[1]!r}") from None
            continue
        try:
            if key in ("b", "r"):
                if len(tok) != 3:
                    raise InvalidInput(f"line {lineno}: edge line needs two endpoints")
                (black if key == "b" else red).append((int(tok[1]), int(tok[2])))
            elif key in ("w", "d", "ew", "y", "g", "gh", "tw"):
                extra.setdefault(key, []).append(tuple(tok[1:]))
            else:
                raise InvalidInput(f"line {lineno}: unknown record {key!r}")
        except ValueError:
            raise InvalidInput(f"line {lineno}: malformed record {line!r}") from None
    if n is None:
        raise InvalidInput("missing 'tgf <n>' header")
    black_set = {_pair(*e) for e in black}
    red_set = {_pair(*e) for e in red}
    if black_set & red_set:
        u, v = min(black_set & red_set)
        raise InvalidInput(f"pair {u}-{v} is both black and red")
    return Trigraph.from_edges(n, sorted(black_set), sorted(red_set)), extra


def format_tgf(g: Trigraph, extra_lines: Iterable[str] = ()) -> str:
    lines = [f"tgf {g.n}"]
    lines += [f"b {u} {v}" for u, v in sorted(g.black)]
    lines += [f"r {u} {v}" for u, v in sorted(g.red)]
    lines += list(extra_lines)
    return "\n".join(lines) + "\n"
