"""Acceptance criteria 1-10.

Each criterion is one test and records a PASS/FAIL line; the lines are printed
in the pytest terminal summary, or directly when this file is run as a script:

    python3 tests/test_acceptance.py
"""

import math
import os
import random
import sys
import time
from fractions import Fraction
from itertools import combinations, permutations, product

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

import brute  # noqa: E402
from twapprox import oracles  # noqa: E402
from twapprox.balance import (BalanceParams, CoarseningStalled, NeatlyDividedMatrix, balanced_partition,  # noqa: E402
                              coarsen_step, delete_rowcols, mixed_value, red_number, validity_scan)
from twapprox.coloring import distance2_edge_coloring, greedy_degeneracy_coloring, is_strong_edge_coloring  # noqa: E402
from twapprox.contraction import partition_at, verify_sequence  # noqa: E402
from twapprox.instances import FIG1_NAMES, gen_by_uncontraction, gen_figure1  # noqa: E402
from twapprox.problems import (AihpInstance, MsimInstance, SetColoringInstance, StarForestInstance,  # noqa: E402
                               TupleWeights, WmisInstance)
from twapprox.recursion import RegimeParams, drive, exact_solve  # noqa: E402
from twapprox.trigraph import Trigraph, quotient  # noqa: E402
from twapprox.verify import Infeasible, check_solution  # noqa: E402

RESULTS = {}
CORE = ("mis", "setcol", "msim", "mlisf")


def record(k, ok, detail):
    RESULTS[k] = (ok, detail)
    return ok


def unit_instance(problem, g):
    return {"mis": WmisInstance.unit, "setcol": SetColoringInstance.unit, "msim": MsimInstance.unit,
            "mlisf": StarForestInstance.unit, "mief": StarForestInstance.unit}[problem](g)


# -- criterion 1 ----------------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    g, seq = gen_figure1()
    width = verify_sequence(g, seq).width
    parts = {"".join(sorted(FIG1_NAMES[v] for v in p)) for p in partition_at(g, seq, 3).parts}
    dt = time.perf_counter() - t0
    ok = width == 2 and parts == {"adg", "bef", "c"} and dt < 1.0
    return record(1, ok, f"width={width} P3={sorted(parts)} {dt * 1000:.1f}ms")


# -- criteria 2 and 3 share one sweep ----------------------------------------------------

_SWEEP = {}


def sweep(count=500):
    if _SWEEP:
        return _SWEEP
    t0 = time.perf_counter()
    runs = violations = infeasible = 0
    worst = {}
    for i in range(count):
        n = 8 + i % 17
        d = 1 + i % 3
        g, seq = gen_by_uncontraction(n, d, seed=1000 + i)
        for problem in CORE:
            inst = unit_instance(problem, g)
            _, opt = exact_solve(problem, inst)
            for q in (1, 2):
                regime = RegimeParams("fixed", q=q, threshold=1 + i % 3)
                res = drive(problem, inst, regime, seq)
                runs += 1
                try:
                    if check_solution(problem, inst, res.solution) != res.value:
                        infeasible += 1
                except Infeasible:
                    infeasible += 1
                realized = res.realized_ratio(opt)
                if realized > res.certified_bound:
                    violations += 1
                worst[problem] = max(worst.get(problem, 0), float(realized))
    _SWEEP.update(instances=count, runs=runs, violations=violations, infeasible=infeasible,
                  seconds=time.perf_counter() - t0, worst=worst)
    return _SWEEP


def criterion_2():
    s = sweep()
    ok = s["instances"] >= 500 and s["violations"] == 0 and s["seconds"] < 600
    worst = " ".join(f"{p}:{r:.2f}" for p, r in sorted(s["worst"].items()))
    return record(2, ok, f"{s['instances']} instances, {s['runs']} runs, {s['violations']} violations, "
                         f"{s['seconds']:.0f}s, worst realized {worst}")


def criterion_3():
    s = sweep()
    return record(3, s["infeasible"] == 0, f"{s['runs']} solutions verified, {s['infeasible']} infeasible")


# -- criterion 4 ------------------------------------------------------------------------

def _brute_value(problem, inst):
    g = inst.graph
    if problem == "mis":
        return brute.mis(g, inst.weights)
    if problem == "setcol":
        return Fraction(brute.chromatic_b(g, inst.demand))
    if problem == "msim":
        return brute.induced_matching(g, inst.Y, inst.w)
    if problem == "mlisf":
        return brute.star_forest(g, inst.weights, inst.Y)
    if problem == "mief":
        return Fraction(brute.induced_forest_edges(g, inst.Y))
    return brute.aihp(g, inst.pattern, inst.weights, inst.gamma, inst.gamma_h)


def _random_instance(problem, rng, i):
    n = rng.randint(4, 9)
    g, _ = gen_by_uncontraction(n, 1 + i % 3, seed=i)
    if problem == "mis":
        return WmisInstance(g, tuple(Fraction(rng.randint(0, 6), rng.randint(1, 3)) for _ in range(n)))
    if problem == "setcol":
        return SetColoringInstance(g, tuple(rng.randint(1, 2) for _ in range(n)))
    if problem == "msim":
        Y = frozenset(e for e in g.black if rng.random() < 0.8)
        return MsimInstance(g, Y, {e: Fraction(rng.randint(1, 5)) for e in Y})
    if problem == "mlisf":
        Y = frozenset(e for e in g.black if rng.random() < 0.8)
        return StarForestInstance(g, tuple(Fraction(rng.randint(0, 4)) for _ in range(n)), Y)
    if problem == "mief":
        return StarForestInstance.unit(g, frozenset(e for e in g.black if rng.random() < 0.8))
    H = rng.choice([Trigraph.empty(1), Trigraph.from_edges(2, [(0, 1)]),
                    Trigraph.from_edges(3, [(0, 1), (1, 2)]), Trigraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])])
    gamma = tuple(rng.randint(0, 1) for _ in range(n))
    gamma_h = tuple(rng.randint(0, 1) for _ in range(H.n))
    tab = {t: Fraction(rng.randint(0, 3)) for t in permutations(range(n), H.n) if rng.random() < 0.3}
    return AihpInstance(g, H, TupleWeights(tab, Fraction(1)), gamma, gamma_h)


def criterion_4(count=100):
    problems = ("mis", "setcol", "msim", "mlisf", "mief", "aihp")
    bad = []
    for seed, problem in enumerate(problems):
        rng = random.Random(400 + seed)
        for i in range(count):
            inst = _random_instance(problem, rng, i)
            res = drive(problem, inst, RegimeParams("exact"))
            _, opt = exact_solve(problem, inst)
            ref = _brute_value(problem, inst)
            if not (res.value == opt == ref and res.certified_bound == 1):
                bad.append((problem, i))
    return record(4, not bad, f"{count} instances x {len(problems)} problems, mismatches {bad[:5]}")


# -- criterion 5 ------------------------------------------------------------------------

def criterion_5():
    params = BalanceParams()
    rng = random.Random(5)
    bad = []
    sizes = [16, 17, 25, 40, 64, 99, 150, 200, 256, 300, 350, 400]
    count = 0
    for n in sizes:
        for d in (1, 2, 3):
            g, seq = gen_by_uncontraction(n, d, seed=rng.randrange(10 ** 6))
            bp = balanced_partition(g, seq, BalanceParams(d_hat=d))
            count += 1
            recount = quotient(g, bp.partition).max_red_degree()
            if (len(bp.partition) != math.isqrt(n) or bp.achieved_part_size > params.ps_cap * math.sqrt(n)
                    or bp.achieved_red_degree != recount):
                bad.append((n, d, len(bp.partition), bp.achieved_part_size, bp.achieved_red_degree, recount))
    return record(5, not bad, f"{count} instances n in [16,400], failures {bad[:3]}")


# -- criterion 6 ------------------------------------------------------------------------

def _random_matrix(rng):
    k = rng.randint(1, 48)
    M = np.zeros((k, k), dtype=np.uint8)
    pr = rng.choice([0.0, 0.05, 0.2])
    for i in range(k):
        for j in range(i + 1, k):
            x = rng.random()
            M[i, j] = M[j, i] = 2 if x < pr else int(x < 0.5)
    return NeatlyDividedMatrix(M, tuple(range(k + 1)), tuple(range(k)))


def criterion_6(count=200):
    rng = random.Random(6)
    bad = steps = 0
    for _ in range(count):
        N = _random_matrix(rng)
        for _ in range(3):
            try:
                N, _, _ = coarsen_step(N, rng.randint(2, 8), rng.randint(2, 4))
            except CoarseningStalled:
                break
            steps += 1
            if not (validity_scan(N) and N.is_symmetric() and brute.neat(N.M.tolist(), N.starts)):
                bad += 1
            S = rng.sample(range(N.size), rng.randint(0, N.size // 2))
            D = delete_rowcols(N, S)
            steps += 1
            if not (validity_scan(D) and D.is_symmetric() and brute.neat(D.M.tolist(), D.starts)):
                bad += 1
            if mixed_value(D) > mixed_value(N) or red_number(D) > red_number(N):
                bad += 1
            N = D if D.size else N
    return record(6, bad == 0, f"{count} matrices, {steps} operations checked, {bad} failures")


# -- criterion 7 ------------------------------------------------------------------------

def _graphs_up_to_iso(n):
    pairs = list(combinations(range(n), 2))
    seen, out = set(), []
    perms = list(permutations(range(n)))
    for m in range(1 << len(pairs)):
        E = {pairs[t] for t in range(len(pairs)) if m >> t & 1}
        code = min(tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in E)) for p in perms)
        if code not in seen:
            seen.add(code)
            out.append(Trigraph.from_edges(n, sorted(E)))
    return out


def criterion_7():
    t0 = time.perf_counter()
    checked = bad = 0
    for n in range(1, 6):
        for g in _graphs_up_to_iso(n):
            for b in product((1, 2), repeat=n):
                _, chi = oracles.exact_set_coloring(g, list(b))
                for r in (2, 3):
                    _, chi_r = oracles.exact_set_coloring(g, [r * x for x in b])
                    checked += 1
                    if chi_r > r * chi:
                        bad += 1
    dt = time.perf_counter() - t0
    return record(7, bad == 0 and dt < 300, f"{checked} (G, b, r) triples, {bad} violations, {dt:.1f}s")


# -- criterion 8 ------------------------------------------------------------------------

def criterion_8(count=300):
    rng = random.Random(8)
    bad = 0
    for i in range(count):
        n = rng.randint(2, 40)
        cap = rng.randint(1, 6)
        deg = [0] * n
        black, red = [], []
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        rng.shuffle(pairs)
        for u, v in pairs:
            if deg[u] < cap and deg[v] < cap and rng.random() < 0.3:
                deg[u] += 1
                deg[v] += 1
                (red if rng.random() < 0.5 else black).append((u, v))
        g = Trigraph.from_edges(n, black, red)
        rg = Trigraph.from_masks(g.red_adj)
        col = greedy_degeneracy_coloring(g.red_adj)
        D = rg.max_degree()
        if any(col[u] == col[v] for u, v in rg.black) or max(col) + 1 > D + 1:
            bad += 1
        tg = Trigraph.from_masks(tuple(b | r for b, r in zip(g.black_adj, g.red_adj)))
        ec = distance2_edge_coloring(tg)
        Dt = tg.max_degree()
        if not is_strong_edge_coloring(tg, ec) or len(set(ec.values())) > 2 * Dt * (Dt - 1) + 1:
            bad += 1
    return record(8, bad == 0, f"{count} graphs, {bad} bound violations")


# -- criterion 9 ------------------------------------------------------------------------

def criterion_9(count=50):
    K1, K2 = Trigraph.empty(1), Trigraph.from_edges(2, [(0, 1)])
    bad = []
    for i in range(count):
        rng = random.Random(900 + i)
        g, seq = gen_by_uncontraction(rng.randint(8, 20), 1 + i % 3, seed=900 + i)
        w = tuple(Fraction(rng.randint(1, 9)) for _ in range(g.n))
        for regime in (RegimeParams("exact"), RegimeParams("fixed", q=1, threshold=2)):
            a = drive("aihp", AihpInstance(g, K1, TupleWeights({(v,): w[v] for v in range(g.n)})), regime, seq)
            m = drive("mis", WmisInstance(g, w), regime, seq)
            if a.value != m.value:
                bad.append(("K1", i, regime.describe()))
            a = drive("aihp", AihpInstance(g, K2), regime, seq)
            m = drive("msim", MsimInstance.unit(g), regime, seq)
            if Fraction(len(a.solution)) != m.value or a.value != m.value:
                bad.append(("K2", i, regime.describe()))
    return record(9, not bad, f"{count} instances each for K1 and K2, mismatches {bad[:4]}")


# -- criterion 10 -----------------------------------------------------------------------

def criterion_10(count=30):
    bad = []
    checked = 0
    for i in range(count):
        n = 12 + (i * 5) % 13
        g, seq = gen_by_uncontraction(n, 1 + i % 3, seed=2000 + i)
        for problem in CORE:
            inst = unit_instance(problem, g)
            prev_bound, prev_base = None, None
            for q in (0, 1, 2):
                res = drive(problem, inst, RegimeParams("fixed", q=q, threshold=2), seq)
                tr = res.trace
                base = max(tr.base_sizes.values())
                checked += 1
                if prev_bound is not None and (res.certified_bound < prev_bound or base > prev_base):
                    bad.append((i, problem, q, "monotone"))
                f = tr.shrink
                for level, size in tr.base_sizes.items():
                    if level == 0:
                        continue
                    cap = f ** (2 - 2 ** (1 - level)) * n ** (2.0 ** -level)
                    if size > cap + 1e-9:
                        bad.append((i, problem, q, level, size, round(cap, 3)))
                prev_bound, prev_base = res.certified_bound, base
    return record(10, not bad, f"{count} instances x {len(CORE)} problems, {checked} runs, failures {bad[:3]}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k):
    ok = CRITERIA[k - 1]()
    assert ok, f"criterion {k}: {RESULTS[k][1]}"


def report_lines():
    return [f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}" for k, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for k, fn in enumerate(CRITERIA, 1):
        fn()
        ok, detail = RESULTS[k]
        print(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
