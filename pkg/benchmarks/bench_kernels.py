"""Time the numba kernels against the pure-numpy fallbacks.

Runs each hot-loop kernel on a representative synthetic workload with both
backends and prints the timings side by side. The numba functions are called
once before timing so JIT compilation is not billed to the measurement.

Usage: python3 benchmarks/bench_kernels.py [--repeats 3]
"""

import argparse
import time

import numpy as np

from polarscore.kernels import numpy_impl

try:
    from polarscore.kernels import numba_impl
except ImportError:
    numba_impl = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def sgns_workload(rng):
    vocab, dim, pairs, k = 2000, 100, 200_000, 5
    centers = rng.integers(0, vocab, pairs).astype(np.int64)
    contexts = rng.integers(0, vocab, pairs).astype(np.int64)
    negatives = rng.integers(0, vocab, (pairs, k)).astype(np.int64)
    lrs = np.full(pairs, 0.025)

    def runner(impl):
        W = rng.normal(0, 0.1, (vocab, dim))
        C = rng.normal(0, 0.1, (vocab, dim))
        return lambda: impl.sgns_train_epoch(W, C, centers, contexts,
                                             negatives, lrs)

    return "sgns_train_epoch (200k pairs, k=5, dim=100)", runner


def walks_workload(rng):
    n, avg_deg = 500, 8
    rows = np.repeat(np.arange(n), avg_deg)
    cols = rng.integers(0, n, n * avg_deg)
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    indptr = np.cumsum(indptr)
    indices = cols.astype(np.int64)
    anchor_mask = np.zeros(n, dtype=bool)
    anchor_mask[rng.choice(n, 25, replace=False)] = True
    starts = np.arange(n, dtype=np.int64)

    def runner(impl):
        return lambda: impl.walk_hitting_times(indptr, indices, anchor_mask,
                                               starts, 1000, 500, 0)

    return "walk_hitting_times (500 vertices, 1000 walks each)", runner


def mst_workload(rng):
    points = rng.normal(size=(1200, 2))
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    core = np.sort(dist, axis=1)[:, 15]

    def runner(impl):
        return lambda: impl.mutual_reachability_mst(dist, core)

    return "mutual_reachability_mst (1200 points)", runner


def layout_workload(rng):
    n, n_edges = 2000, 10_000
    heads = rng.integers(0, n, n_edges).astype(np.int64)
    tails = rng.integers(0, n, n_edges).astype(np.int64)
    weights = rng.random(n_edges)

    def runner(impl):
        pos = rng.normal(size=(n, 2)) * 10.0
        return lambda: impl.layout_optimize(pos, heads, tails, weights,
                                            200, 5, 1.0, 0)

    return "layout_optimize (2000 points, 10k edges, 200 epochs)", runner


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repeats per backend; min is reported")
    args = parser.parse_args()

    if numba_impl is None:
        print("numba is not importable; only the numpy fallback is timed")

    rng = np.random.default_rng(0)
    workloads = [sgns_workload(rng), walks_workload(rng), mst_workload(rng),
                 layout_workload(rng)]

    name_w = max(len(name) for name, _ in workloads)
    header = f"{'kernel':<{name_w}}  {'numpy':>9}  {'numba':>9}  {'speedup':>7}"
    print(header)
    print("-" * len(header))
    for name, runner in workloads:
        t_np = best_of(runner(numpy_impl), args.repeats)
        if numba_impl is not None:
            runner(numba_impl)()  # JIT warmup
            t_nb = best_of(runner(numba_impl), args.repeats)
            print(f"{name:<{name_w}}  {t_np:>8.3f}s  {t_nb:>8.3f}s  "
                  f"{t_np / t_nb:>6.1f}x")
        else:
            print(f"{name:<{name_w}}  {t_np:>8.3f}s  {'-':>9}  {'-':>7}")


if __name__ == "__main__":
    main()
