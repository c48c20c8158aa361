"""Compare the compiled kernels against their pure-Python bodies.

    python3 benchmarks/bench_kernels.py [--steps 200000] [--n-exact 12] [--repeat 3]

Each kernel is run once through numba (after a warm-up call that triggers
compilation) and once through ``.py_func``, on identical inputs; outputs are
checked for equality before timings are reported. With MAJSIM_DISABLE_NUMBA=1
both columns time the same Python code.
"""
import argparse
import time

import numpy as np

from majsim import kernels
from majsim._jit import USING_NUMBA
from majsim.dynamics import init_opinions, potential_floor
from majsim.exact import _tables
from majsim.graph import make_cycle, make_random_connected


def best_of(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def stepping_case(steps):
    graph = make_random_connected(200, 400, seed=1)
    indptr, indices = graph.csr
    x0 = init_opinions(graph.n, 0.5, np.random.default_rng(2))
    draws = np.random.default_rng(3).random((steps, 2))
    empty_i = np.empty(0, dtype=np.int64)

    def run(init, kernel):
        def go():
            x = x0.copy()
            agree = np.empty(graph.n, dtype=np.int64)
            disagree = np.empty(graph.n, dtype=np.int64)
            init(indptr, indices, x, agree, disagree)
            z = potential_floor(graph) + int(disagree.sum())
            res = kernel(indptr, indices, x, agree, disagree, draws, z, False,
                         empty_i, empty_i, empty_i, empty_i, empty_i, empty_i)
            return res, x
        return go

    return "advance (n=200, no early stop)", steps, \
        run(kernels.init_counts, kernels.advance), \
        run(kernels.init_counts.py_func, kernels.advance.py_func)


def weights_case(n):
    graph = make_cycle(n)
    maxdeg = int(graph.degrees.max())
    nbr = np.full((n, maxdeg), -1, dtype=np.int64)
    for i, row in enumerate(graph.adjacency):
        nbr[i, : len(row)] = row
    codes = np.arange(1 << n, dtype=np.int64)

    def run(kernel):
        return lambda: kernel(nbr, graph.degrees, n, codes)

    return f"flip_weights (cycle n={n})", 1 << n, run(kernels.flip_weights), run(kernels.flip_weights.py_func)


def sweep_case(n):
    t = _tables(make_cycle(n))

    def run(kernel):
        def go():
            h = t.consensus.astype(np.float64)
            kernel(t.order, t.weights, t.consensus, h)
            return h
        return go

    return f"hit_sweep (cycle n={n})", 1 << n, run(kernels.hit_sweep), run(kernels.hit_sweep.py_func)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(u, v) for u, v in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--n-exact", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"numba enabled: {USING_NUMBA}")
    print(f"{'kernel':<34}{'work':>10}{'compiled s':>13}{'python s':>12}{'speedup':>10}")
    for label, work, fast, slow in (stepping_case(args.steps),
                                    weights_case(args.n_exact),
                                    sweep_case(args.n_exact)):
        fast()  # compile
        t_fast, out_fast = best_of(fast, args.repeat)
        t_slow, out_slow = best_of(slow, 1)
        if not same(out_fast, out_slow):
            raise SystemExit(f"{label}: compiled and python outputs differ")
        print(f"{label:<34}{work:>10}{t_fast:>13.4f}{t_slow:>12.4f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
