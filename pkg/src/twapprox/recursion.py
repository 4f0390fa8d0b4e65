"""Depth-bounded recursion: exact oracles at the leaves, solver decompositions above.

Every decomposition composes a certified ratio from the quantities it actually
achieved (red degree of the quotient, colors used, child bounds), so a run's
``certified_bound`` is an honest upper bound on OPT/value (or value/OPT for
set coloring) whatever the balance engine managed to do.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import oracles
from .balance import BalanceParams, balanced_partition
from .problems import (AihpInstance, MsimInstance, SetColoringInstance, StarForestInstance,
                       WmisInstance)
from .trigraph import InvalidInput

PROBLEMS = ("mis", "setcol", "msim", "mlisf", "mief", "aihp")
MINIMIZE = {"setcol"}


@dataclass
class RegimeParams:
    mode: str = "exact"  # exact | fixed | eps | log
    q: int = 0
    eps: float = 0.5
    threshold: int = 3
    seed: int = 0
    balance: BalanceParams = field(default_factory=BalanceParams)
    budget: oracles.OracleBudget | None = None
    clustered: bool = False
    cluster_cap: int = 3
    h_cap: int = 4

    def __post_init__(self):
        if self.mode not in ("exact", "fixed", "eps", "log"):
            raise InvalidInput(f"unknown regime mode {self.mode!r}")
        if self.q < 0:
            raise InvalidInput("q must be >= 0")
        if self.mode == "eps" and not self.eps > 0:
            raise InvalidInput("epsilon must be positive")
        if self.threshold < 1:
            raise InvalidInput("threshold must be >= 1")

    @classmethod
    def parse(cls, text: str, **kw) -> "RegimeParams":
        text = text.strip()
        if text == "exact":
            return cls("exact", **kw)
        if text == "log":
            return cls("log", **kw)
        key, sep, val = text.partition("=")
        try:
            if sep and key == "q":
                return cls("fixed", q=int(val), **kw)
            if sep and key == "eps":
                return cls("eps", eps=float(val), **kw)
        except ValueError:
            pass
        raise InvalidInput(f"bad regime {text!r}; use exact, q=<k>, eps=<x> or log")

    def describe(self) -> str:
        return {"exact": "exact", "fixed": f"q={self.q}", "eps": f"eps={self.eps}", "log": "log"}[self.mode]


def level_factor(problem: str, d: int, h: int = 1) -> int:
    """Per-level ratio F used only to pick the depth (one level, exact children)."""
    if problem in ("mis", "setcol"):
        return d + 1
    if problem in ("msim", "mlisf", "mief"):
        return 3 * (2 * d * (d - 1) + 1)
    return (d + 1) ** h


def depth_cap(n: int) -> int:
    if n <= 2:
        return 0
    return math.ceil(math.log2(math.log2(n)))


def choose_depth(n: int, regime: RegimeParams, F: int = 1) -> int:
    if n < 1 or F < 1:
        raise InvalidInput("choose_depth needs n >= 1 and F >= 1")
    if regime.mode == "exact":
        return 0
    if regime.mode == "fixed":
        return regime.q
    limit = n ** regime.eps if regime.mode == "eps" else math.log2(n) if n > 1 else 1.0
    cap = depth_cap(n)
    if F == 1:
        return cap
    q = 0
    while q < cap and F ** (2 ** (q + 1) - 1) <= limit:
        q += 1
    return q


@dataclass
class Trace:
    depth: int = 0
    calls: int = 0
    d_eff_levels: list = field(default_factory=list)
    base_sizes: dict = field(default_factory=dict)  # level -> max oracle instance size
    shrink: float = 0.0  # max child size / sqrt(parent size)
    notes: list = field(default_factory=list)
    ms: float = 0.0

    def record_level(self, level, d):
        while len(self.d_eff_levels) <= level:
            self.d_eff_levels.append(0)
        self.d_eff_levels[level] = max(self.d_eff_levels[level], d)

    def record_base(self, level, n):
        self.base_sizes[level] = max(self.base_sizes.get(level, 0), n)

    def note(self, msg):
        if msg not in self.notes:
            self.notes.append(msg)

    def as_dict(self) -> dict:
        return {"depth": self.depth, "calls": self.calls, "d_eff_levels": list(self.d_eff_levels),
                "base_sizes": {str(k): v for k, v in sorted(self.base_sizes.items())},
                "f": round(self.shrink, 6), "notes": list(self.notes), "ms": round(self.ms, 3)}


@dataclass
class SubResult:
    solution: object
    value: Fraction
    bound: Fraction
    info: object = None


@dataclass
class ApproxResult:
    problem: str
    n: int
    solution: object
    value: Fraction
    certified_bound: Fraction
    trace: Trace
    regime: str = "exact"

    @property
    def minimize(self) -> bool:
        return self.problem in MINIMIZE

    def realized_ratio(self, opt) -> Fraction:
        opt = Fraction(opt)
        if self.minimize:
            return Fraction(1) if opt == 0 else self.value / opt
        if self.value == 0:
            return Fraction(1) if opt == 0 else Fraction(10**18)
        return opt / self.value


# -- base cases -----------------------------------------------------------------

def _oracle(problem, inst, budget):
    if problem == "mis":
        return oracles.solve_wmis(inst, budget)
    if problem == "setcol":
        pal, k = oracles.solve_setcol(inst, budget)
        return pal, Fraction(k)
    if problem == "msim":
        return oracles.solve_msim(inst, budget)
    if problem == "mlisf":
        return oracles.solve_mlisf(inst, budget)
    if problem == "mief":
        S, e = oracles.exact_mief(inst.graph, inst.Y, budget)
        return S, Fraction(e)
    if problem == "aihp":
        return oracles.solve_aihp(inst, budget)
    raise InvalidInput(f"unknown problem {problem!r}")


_TYPES = {"mis": WmisInstance, "setcol": SetColoringInstance, "msim": MsimInstance,
          "mlisf": StarForestInstance, "mief": StarForestInstance, "aihp": AihpInstance}


class SubSolver:
    """Callable handed to solver adapters: ``solve_sub(problem, inst, src)``.

    Calls go one level down; ``redispatch`` re-poses the same instance as
    another problem at the current level (a reduction, not a decomposition).
    """

    def __init__(self, drv, depth, level, parent_n):
        self.drv, self.depth, self.level, self.parent_n = drv, depth, level, parent_n
        self.regime = drv.regime
        self.trace = drv.trace

    def __call__(self, problem, inst, src=None) -> SubResult:
        return self.drv.sub(problem, inst, src, self.depth - 1, self.level + 1, self.parent_n)

    def redispatch(self, problem, inst, src=None) -> SubResult:
        return self.drv.sub(problem, inst, src, self.depth, self.level, None)


class Driver:
    def __init__(self, regime: RegimeParams):
        self.regime = regime
        self.trace = Trace()

    def sub(self, problem, inst, src, depth, level, parent_n=None, bp=None) -> SubResult:
        self.trace.calls += 1
        n = inst.n
        if parent_n is not None and parent_n > 0:
            self.trace.shrink = max(self.trace.shrink, n / math.sqrt(parent_n))
        if depth <= 0 or n <= self.regime.threshold:
            sol, val = _oracle(problem, inst, self.regime.budget)
            self.trace.record_base(level, n)
            return SubResult(sol, Fraction(val), Fraction(1))
        if bp is None:
            bp = balanced_partition(inst.graph, src, self.regime.balance)
        if not bp.balance_certified:
            self.trace.note("balance fallback used")
        self.trace.record_level(level, bp.achieved_red_degree)
        solve_sub = SubSolver(self, depth, level, n)
        return _adapter(problem, self.regime)(inst, bp, solve_sub)


def _adapter(problem, regime):
    from . import matching, mis, packing, setcoloring
    if problem == "mis":
        if regime.clustered:
            return lambda inst, ctx, sub: mis.wmis_clustered(inst, ctx, sub, regime.cluster_cap)
        return mis.wmis_approx
    return {"setcol": setcoloring.set_coloring_approx, "msim": matching.msim_approx,
            "mlisf": packing.mlisf_approx, "mief": packing.mief_approx,
            "aihp": packing.aihp_approx}[problem]


def drive(problem: str, inst, regime: RegimeParams | None = None, src=None) -> ApproxResult:
    """Solve ``inst`` under ``regime``; ``src`` seeds the top-level balanced partition."""
    regime = regime or RegimeParams()
    if problem not in PROBLEMS:
        raise InvalidInput(f"unknown problem {problem!r}")
    if not isinstance(inst, _TYPES[problem]):
        raise InvalidInput(f"{problem} expects a {_TYPES[problem].__name__}")
    if inst.graph.red:
        raise InvalidInput("solvers take graphs; the input has red edges")
    if problem == "aihp":
        from .packing import check_pattern
        check_pattern(inst.pattern, regime.h_cap)
    drv = Driver(regime)
    t0 = time.perf_counter()
    bp = None
    if regime.mode in ("eps", "log") and inst.n > regime.threshold:
        bp = balanced_partition(inst.graph, src, regime.balance)
        h = inst.h if problem == "aihp" else 1
        q = choose_depth(inst.n, regime, level_factor(problem, bp.achieved_red_degree, h))
    else:
        q = choose_depth(max(inst.n, 1), regime)
    drv.trace.depth = q
    res = drv.sub(problem, inst, src, q, 0, None, bp)
    drv.trace.ms = (time.perf_counter() - t0) * 1000
    return ApproxResult(problem, inst.n, res.solution, res.value, res.bound, drv.trace, regime.describe())


solve = drive


def exact_solve(problem, inst, budget=None):
    """Oracle value of ``inst`` as (solution, Fraction)."""
    sol, val = _oracle(problem, inst, budget)
    return sol, Fraction(val)
