#!/usr/bin/env python3
"""Benchmark the probe's numba kernels against the pure-numpy fallback.

Generates a synthetic hashed-feature matrix shaped like a real audit run
(thousands of documents, a few hundred active features each), times one
SGD epoch and one full scoring pass on both backends, and checks that
they agree numerically.

Usage:
    python benchmarks/bench_kernels.py [--rows N] [--nnz N] [--labels N]
                                       [--dims N] [--repeats N]

Forcing the fallback at import time (for a one-sided run):
    LEAKAUDIT_PURE_NUMPY=1 python benchmarks/bench_kernels.py
"""
import argparse
import time

import numpy as np

from leakaudit.probe import kernels


def synthetic_csr(rows, nnz_per_row, dims, labels, seed=0):
    rng = np.random.default_rng(seed)
    indptr = np.arange(0, (rows + 1) * nnz_per_row, nnz_per_row, dtype=np.int64)
    indices = np.concatenate(
        [
            np.sort(rng.choice(dims, size=nnz_per_row, replace=False))
            for _ in range(rows)
        ]
    ).astype(np.int64)
    data = rng.integers(1, 5, size=rows * nnz_per_row).astype(np.float64)
    y = rng.integers(0, labels, size=rows).astype(np.int64)
    return indptr, indices, data, y


def time_fn(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=5000)
    parser.add_argument("--nnz", type=int, default=300)
    parser.add_argument("--labels", type=int, default=6)
    parser.add_argument("--dims", type=int, default=2**18)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    indptr, indices, data, y = synthetic_csr(args.rows, args.nnz, args.dims, args.labels)
    order = np.random.default_rng(1).permutation(args.rows).astype(np.int64)
    print(f"rows={args.rows} nnz/row={args.nnz} labels={args.labels} dims={args.dims}")
    print(f"selected backend: {kernels.BACKEND}")

    backends = [("numpy", kernels.sgd_epoch_numpy, kernels.score_all_numpy)]
    if kernels.BACKEND == "numba":
        backends.insert(0, ("numba", kernels.sgd_epoch, kernels.score_all))
        # trigger JIT compilation outside the timed region
        w = np.zeros((args.labels, args.dims))
        b = np.zeros(args.labels)
        kernels.sgd_epoch(w, b, indptr[:2], indices[: args.nnz],
                          data[: args.nnz], y[:1], np.zeros(1, dtype=np.int64), 0.1)
        kernels.score_all(w, b, indptr[:2], indices[: args.nnz],
                          data[: args.nnz], np.zeros((1, args.labels)))

    results = {}
    for name, sgd, score in backends:
        weights = np.zeros((args.labels, args.dims))
        bias = np.zeros(args.labels)
        t_train = time_fn(
            lambda: sgd(weights, bias, indptr, indices, data, y, order, 0.1),
            args.repeats,
        )
        out = np.zeros((args.rows, args.labels))
        t_score = time_fn(
            lambda: score(weights, bias, indptr, indices, data, out),
            args.repeats,
        )
        results[name] = (t_train, t_score, weights.copy(), bias.copy(), out.copy())
        print(f"{name:>6}: sgd epoch {t_train*1e3:8.1f} ms   score pass {t_score*1e3:8.1f} ms")

    if len(results) == 2:
        t_np = results["numpy"]
        t_nb = results["numba"]
        print(f"speedup: sgd {t_np[0]/t_nb[0]:.1f}x, score {t_np[1]/t_nb[1]:.1f}x")
        dw = np.max(np.abs(t_np[2] - t_nb[2]))
        ds = np.max(np.abs(t_np[4] - t_nb[4]))
        same_pred = np.array_equal(t_np[4].argmax(axis=1), t_nb[4].argmax(axis=1))
        print(f"agreement: max|dW| = {dw:.3e}, max|dScores| = {ds:.3e}, "
              f"identical predictions: {same_pred}")


if __name__ == "__main__":
    main()
