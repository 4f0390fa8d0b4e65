"""Problem instances and their construction from parsed graph files."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .trigraph import InvalidInput, Trigraph, _pair


def frac(x) -> Fraction:
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InvalidInput(f"bad rational {x!r}") from None


def _vertex(tok, n):
    try:
        v = int(tok)
    except ValueError:
        raise InvalidInput(f"bad vertex id {tok!r}") from None
    if not 0 <= v < n:
        raise InvalidInput(f"vertex {v} out of range for n={n}")
    return v


@dataclass(frozen=True, eq=False)
class WmisInstance:
    graph: Trigraph
    weights: tuple

    @classmethod
    def unit(cls, g):
        return cls(g, tuple(Fraction(1) for _ in range(g.n)))

    @property
    def n(self):
        return self.graph.n


@dataclass(frozen=True, eq=False)
class SetColoringInstance:
    graph: Trigraph
    demand: tuple

    @classmethod
    def unit(cls, g):
        return cls(g, tuple(1 for _ in range(g.n)))

    @property
    def n(self):
        return self.graph.n


@dataclass(frozen=True, eq=False)
class MsimInstance:
    graph: Trigraph
    Y: frozenset
    edge_weights: Mapping = field(default_factory=dict)

    @classmethod
    def unit(cls, g, Y=None):
        return cls(g, frozenset(g.black) if Y is None else frozenset(_pair(*e) for e in Y), {})

    def w(self, e) -> Fraction:
        return Fraction(self.edge_weights.get(_pair(*e), 1))

    @property
    def n(self):
        return self.graph.n


@dataclass(frozen=True, eq=False)
class StarForestInstance:
    graph: Trigraph
    weights: tuple
    Y: frozenset

    @classmethod
    def unit(cls, g, Y=None):
        return cls(g, tuple(Fraction(1) for _ in range(g.n)),
                   frozenset(g.black) if Y is None else frozenset(_pair(*e) for e in Y))

    @property
    def n(self):
        return self.graph.n


@dataclass(frozen=True, eq=False)
class TupleWeights:
    """Weights of H-copies keyed by the image tuple (phi(x_0), ..., phi(x_{h-1})).

    Tuples missing from ``table`` get ``default`` (1 = indicator, 0 = zero rule).
    """
    table: Mapping = field(default_factory=dict)
    default: Fraction = Fraction(1)

    def __call__(self, tup) -> Fraction:
        return Fraction(self.table.get(tuple(tup), self.default))

    def restrict(self, index: Mapping[int, int]) -> "TupleWeights":
        """Re-key onto new vertex ids; tuples leaving the index set are dropped."""
        tab = {}
        for tup, q in self.table.items():
            if all(v in index for v in tup):
                tab[tuple(index[v] for v in tup)] = q
        return TupleWeights(tab, self.default)


@dataclass(frozen=True, eq=False)
class AihpInstance:
    graph: Trigraph
    pattern: Trigraph
    weights: TupleWeights = field(default_factory=TupleWeights)
    gamma: tuple | None = None
    gamma_h: tuple | None = None

    def __post_init__(self):
        if self.gamma is None:
            object.__setattr__(self, "gamma", tuple(0 for _ in range(self.graph.n)))
        if self.gamma_h is None:
            object.__setattr__(self, "gamma_h", tuple(0 for _ in range(self.pattern.n)))
        if len(self.gamma) != self.graph.n or len(self.gamma_h) != self.pattern.n:
            raise InvalidInput("label maps must be total")

    @property
    def n(self):
        return self.graph.n

    @property
    def h(self):
        return self.pattern.n


def is_connected(g: Trigraph) -> bool:
    if g.n == 0:
        return False
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for v in range(g.n):
            if frontier >> v & 1:
                nxt |= g.black_adj[v]
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << g.n) - 1


# -- building instances from graph-file records ---------------------------------

def vertex_weights(g, extra) -> tuple:
    w = [Fraction(1)] * g.n
    for rec in extra.get("w", []):
        if len(rec) != 2:
            raise InvalidInput("weight line needs 'w v q'")
        w[_vertex(rec[0], g.n)] = frac(rec[1])
    return tuple(w)


def demands(g, extra) -> tuple:
    b = [1] * g.n
    for rec in extra.get("d", []):
        if len(rec) != 2:
            raise InvalidInput("demand line needs 'd v k'")
        try:
            k = int(rec[1])
        except ValueError:
            raise InvalidInput(f"bad demand {rec[1]!r}") from None
        if k < 1:
            raise InvalidInput("demands must be positive")
        b[_vertex(rec[0], g.n)] = k
    return tuple(b)


def edge_weights(g, extra) -> dict:
    out = {}
    for rec in extra.get("ew", []):
        if len(rec) != 3:
            raise InvalidInput("edge weight line needs 'ew u v q'")
        e = _pair(_vertex(rec[0], g.n), _vertex(rec[1], g.n))
        if e not in g.black:
            raise InvalidInput(f"edge weight on non-edge {e}")
        out[e] = frac(rec[2])
    return out


def prescribed(g, extra, y_records=None) -> frozenset:
    recs = extra.get("y", []) if y_records is None else y_records
    if not recs and y_records is None:
        return frozenset(g.black)
    Y = set()
    for rec in recs:
        if len(rec) != 2:
            raise InvalidInput("prescribed line needs 'y u v'")
        e = _pair(_vertex(rec[0], g.n), _vertex(rec[1], g.n))
        if e not in g.black:
            raise InvalidInput(f"prescribed pair {e} is not an edge")
        Y.add(e)
    return frozenset(Y)


def labels(n, recs) -> tuple:
    out = [0] * n
    for rec in recs:
        if len(rec) != 2:
            raise InvalidInput("label line needs 'g v k'")
        try:
            out[_vertex(rec[0], n)] = int(rec[1])
        except ValueError:
            raise InvalidInput(f"bad label {rec[1]!r}") from None
    return tuple(out)


def tuple_weights(g, h, extra, default=Fraction(1)) -> TupleWeights:
    tab = {}
    for rec in extra.get("tw", []):
        if len(rec) != h + 1:
            raise InvalidInput(f"tuple weight line needs {h} vertices and a weight")
        tup = tuple(_vertex(t, g.n) for t in rec[:h])
        tab[tup] = frac(rec[h])
    return TupleWeights(tab, default)
