"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--reps 5] [--seed 0]

Prints one line per kernel with both timings and the speedup, after checking
that the two backends return identical results on every input.
"""

import argparse
import random
import time

import numpy as np

from twapprox import _kernels_py as py
from twapprox.balance import matrix_of
from twapprox.instances import gen_by_uncontraction

try:
    from twapprox import _kernels as native
except ImportError:
    native = None


def _timed(fn, args_list, reps):
    best = float("inf")
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = [fn(*a) for a in args_list]
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def zone_inputs(rng, count=40):
    out = []
    for i in range(count):
        g, _ = gen_by_uncontraction(rng.randint(40, 120), 2, seed=i)
        N = matrix_of(g)
        M = np.array(N.M, dtype=np.int8)
        k = M.shape[0]
        starts = sorted(set([0, k] + rng.sample(range(1, k), min(8, k - 1))))
        starts = np.array(starts, dtype=np.int64)
        cuts = list(starts)
        for a, b in zip(cuts, cuts[1:]):
            out.append((M, starts, int(a), int(b)))
    return out


def mis_inputs(rng, count=20, n=40, p=0.15):
    out = []
    for _ in range(count):
        adj = [0] * n
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    adj[u] |= 1 << v
                    adj[v] |= 1 << u
        w = [rng.randint(1, 20) for _ in range(n)]
        out.append((n, adj, w, 10**8))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if native is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return 1
    rng = random.Random(args.seed)
    z = zone_inputs(rng)
    corners = [(M, s, 0, M.shape[0]) for M, s, _, _ in z[::4]]
    cases = [("zone_column", z), ("row_corners", corners), ("mis_bnb", mis_inputs(rng))]
    print(f"{'kernel':<12} {'calls':>6} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name, inputs in cases:
        tp, rp = _timed(getattr(py, name), inputs, args.reps)
        tc, rc = _timed(getattr(native, name), inputs, args.reps)
        if name == "mis_bnb":
            # node counts may differ in bookkeeping; mask and weight must not
            rp, rc = [r[:2] for r in rp], [r[:2] for r in rc]
        assert all(_same(a, b) for a, b in zip(rp, rc)), f"{name}: backends disagree"
        print(f"{name:<12} {len(inputs):>6} {tp * 1e3:>10.2f} {tc * 1e3:>10.2f} {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
