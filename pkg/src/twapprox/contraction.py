"""Contraction sequences: replay, width certification, partition prefixes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .trigraph import InvalidInput, Trigraph, VertexPartition, iter_bits


class SequenceError(InvalidInput):
    """A contraction step that cannot be applied."""

    def __init__(self, msg, step=None):
        super().__init__(msg)
        self.step = step


@dataclass(frozen=True)
class ContractionSequence:
    origin: int
    steps: tuple[tuple[int, int, int], ...]

    @classmethod
    def of(cls, origin: int, steps: Iterable[Sequence[int]]) -> "ContractionSequence":
        return cls(origin, tuple((int(u), int(v), int(w)) for u, v, w in steps))

    @classmethod
    def from_pairs(cls, origin: int, pairs: Iterable[Sequence[int]]) -> "ContractionSequence":
        """Steps given as (u, v) only; fresh ids are handed out from ``origin``."""
        steps = []
        nxt = origin
        for u, v in pairs:
            steps.append((int(u), int(v), nxt))
            nxt += 1
        return cls(origin, tuple(steps))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def is_full(self) -> bool:
        return len(self.steps) == max(self.origin - 1, 0)


@dataclass
class WidthReport:
    per_step: list[int]
    width: int
    argmax_step: int  # -1 when the sequence is empty
    initial: int = 0

    def as_dict(self):
        return {"width": self.width, "argmax_step": self.argmax_step, "per_step": self.per_step}


class LiveTrigraph:
    """Mutable trigraph keyed by arbitrary integer ids, used for replay."""

    def __init__(self, g: Trigraph):
        self.black = {v: set(iter_bits(g.black_adj[v])) for v in range(g.n)}
        self.red = {v: set(iter_bits(g.red_adj[v])) for v in range(g.n)}
        self.members = {v: [v] for v in range(g.n)}

    def live(self):
        return self.black.keys()

    def contract(self, u: int, v: int, w: int, step=None) -> set[int]:
        """Merge u and v into fresh w; returns vertices whose red degree changed."""
        if u == v:
            raise SequenceError(f"step {step}: cannot contract {u} with itself", step)
        for x in (u, v):
            if x not in self.black:
                raise SequenceError(f"step {step}: vertex {x} is not live", step)
        if w in self.black:
            raise SequenceError(f"step {step}: id {w} is already in use", step)
        bu, bv, ru, rv = self.black.pop(u), self.black.pop(v), self.red.pop(u), self.red.pop(v)
        for x in (u, v):
            for z in bu | bv | ru | rv:
                if z in (u, v):
                    continue
                self.black[z].discard(x)
                self.red[z].discard(x)
        bu.discard(v); bv.discard(u); ru.discard(v); rv.discard(u)
        nb = bu & bv
        nr = (ru | rv | (bu ^ bv)) - nb
        self.black[w] = nb
        self.red[w] = nr
        for z in nb:
            self.black[z].add(w)
        for z in nr:
            self.red[z].add(w)
        self.members[w] = self.members.pop(u) + self.members.pop(v)
        return nr | {w}

    def max_red_degree(self) -> int:
        return max((len(s) for s in self.red.values()), default=0)

    def to_trigraph(self) -> tuple[Trigraph, list[int]]:
        ids = sorted(self.black)
        pos = {x: i for i, x in enumerate(ids)}
        black = [0] * len(ids)
        red = [0] * len(ids)
        for x in ids:
            for z in self.black[x]:
                black[pos[x]] |= 1 << pos[z]
            for z in self.red[x]:
                red[pos[x]] |= 1 << pos[z]
        return Trigraph(len(ids), tuple(black), tuple(red)), ids


def apply_contraction(g: Trigraph, u: int, v: int) -> Trigraph:
    """Contract u, v of ``g``; the merged vertex takes the last index, others keep order."""
    live = LiveTrigraph(g)
    live.contract(u, v, g.n)
    out, _ = live.to_trigraph()
    return out


def verify_sequence(g: Trigraph, seq: ContractionSequence) -> WidthReport:
    if seq.origin != g.n:
        raise SequenceError(f"sequence is over {seq.origin} vertices, graph has {g.n}")
    live = LiveTrigraph(g)
    used = set(range(g.n))
    per_step = []
    for i, (u, v, w) in enumerate(seq.steps):
        if w in used:
            raise SequenceError(f"step {i}: id {w} is not fresh", i)
        used.add(w)
        live.contract(u, v, w, step=i)
        per_step.append(live.max_red_degree())
    initial = g.max_red_degree()
    width = max(per_step + [initial])
    argmax = per_step.index(width) if width in per_step else -1
    return WidthReport(per_step, width, argmax, initial)


def partition_at(g: Trigraph, seq: ContractionSequence, i: int) -> VertexPartition:
    n = g.n
    if not 1 <= i <= max(n, 1):
        raise InvalidInput(f"part count {i} out of range for n={n}")
    need = n - i
    if need > len(seq.steps):
        raise InvalidInput(f"sequence has {len(seq.steps)} steps, {need} needed for {i} parts")
    groups = {v: [v] for v in range(n)}
    for k, (u, v, w) in enumerate(seq.steps[:need]):
        if u not in groups or v not in groups or u == v:
            raise SequenceError(f"step {k}: bad contraction {u},{v}", k)
        groups[w] = groups.pop(u) + groups.pop(v)
    parts = sorted((sorted(p) for p in groups.values()), key=lambda p: p[0])
    return VertexPartition.of(parts, n)


def replay_prefix(g: Trigraph, seq: ContractionSequence, t: int) -> tuple[Trigraph, list[list[int]]]:
    """Trigraph after the first ``t`` steps and, per output vertex, its original members."""
    live = LiveTrigraph(g)
    for k, (u, v, w) in enumerate(seq.steps[:t]):
        live.contract(u, v, w, step=k)
    tg, ids = live.to_trigraph()
    return tg, [sorted(live.members[x]) for x in ids]


def leaf_order(seq: ContractionSequence) -> list[int]:
    """Left-to-right leaves of the contraction forest (roots taken in id order)."""
    children = {}
    has_parent = set()
    for u, v, w in seq.steps:
        children[w] = (u, v)
        has_parent.update((u, v))
    nodes = set(range(seq.origin)) | set(children)
    roots = sorted(x for x in nodes if x not in has_parent)
    order = []
    for r in roots:
        stack = [r]
        while stack:
            x = stack.pop()
            if x in children:
                a, b = children[x]
                stack.append(b)
                stack.append(a)
            else:
                order.append(x)
    return order


def parse_seq(text: str) -> ContractionSequence:
    origin = None
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if origin is None:
            if tok[0] != "seq" or len(tok) != 2:
                raise InvalidInput(f"line {lineno}: expected header 'seq <n>'")
            try:
                origin = int(tok[1])
            except ValueError:
                raise InvalidInput(f"line {lineno}: bad count {tok[1]!r}") from None
            continue
        if tok[0] != "c" or len(tok) != 4:
            raise InvalidInput(f"line {lineno}: expected 'c u v w'")
        try:
            steps.append((int(tok[1]), int(tok[2]), int(tok[3])))
        except ValueError:
            raise InvalidInput(f"line {lineno}: non-integer id") from None
    if origin is None:
        raise InvalidInput("missing 'seq <n>' header")
    return ContractionSequence(origin, tuple(steps))


def format_seq(seq: ContractionSequence) -> str:
    return "\n".join([f"seq {seq.origin}"] + [f"c {u} {v} {w}" for u, v, w in seq.steps]) + "\n"
