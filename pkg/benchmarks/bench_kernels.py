"""Time each hot kernel under numba and under plain numpy.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--scale small|medium]

Both implementations are called directly, so the NETPOWER_DISABLE_JIT flag
does not matter here. The first numba call (compilation) is excluded from the
timings. Outputs are checked for agreement before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from netpower import kernels
from netpower._jit import HAVE_NUMBA
from netpower.numerics import grounded_inverse


def _random_graph(rng, n, p):
    A = (rng.random((n, n)) < p).astype(float)
    A = np.triu(A, 1)
    A = A + A.T
    for i in range(n - 1):  # keep it connected
        A[i, i + 1] = A[i + 1, i] = 1.0
    return A


def _csr(A):
    rows, cols = np.nonzero(A)
    indptr = np.searchsorted(rows, np.arange(A.shape[0] + 1)).astype(np.int64)
    return indptr, cols.astype(np.int64)


def cases(scale: str):
    rng = np.random.default_rng(2024)
    n_graph = 120 if scale == "small" else 400
    n_players = 14 if scale == "small" else 18
    n_dp = 14 if scale == "small" else 17
    n_iter = 20_000 if scale == "small" else 100_000

    A = _random_graph(rng, n_graph, 4.0 / n_graph)
    indptr, indices = _csr(A)
    yield "bfs_geodesics", (indptr, indices, n_graph)

    w = rng.integers(1, 20, n_players).astype(np.int64)
    yield "coalition_counts", (w, np.int64(w.sum() // 2 + 1), False)

    m = 12
    win = (rng.random(1 << m) < 0.5).astype(np.int64)
    win[-1] = 1
    yield "marginal_counts", (win,)

    S = np.where(rng.random((13, 13)) < 0.2, rng.random((13, 13)) * 0.3, 0.0)
    np.fill_diagonal(S, 0.0)
    yield "closure_table", (S, np.full(13, 0.5), True)

    Aw = _random_graph(rng, 60 if scale == "small" else 150, 0.08)
    yield "walk_betweenness", (Aw, grounded_inverse(Aw, Aw.shape[0] - 1))

    Sd = np.where(rng.random((n_dp, n_dp)) < 0.25, rng.random((n_dp, n_dp)) * 0.3, 0.0)
    np.fill_diagonal(Sd, 0.0)
    cap = np.maximum(0.0, 1.0 - Sd.sum(axis=0))
    yield "certification_dp", (Sd, np.full(n_dp, 0.5), rng.random(n_dp) + 0.5, cap, np.int64((1 << n_dp) - 1))

    ptr = np.array([0, 0, 3, 5], dtype=np.int64)
    holders = np.array([0, 2, 3, 0, 1], dtype=np.int64)
    hw = np.array([0.49, 0.49, 0.02, 0.6, 0.4])
    keys = np.random.default_rng(1).random((n_iter, holders.size))
    yield "draw_links", (keys, ptr, holders, hw, 0.5, False)
    links = kernels.draw_links_numpy(keys, ptr, holders, hw, 0.5, False)
    targets = np.array([1, 1, 1, 2, 2], dtype=np.int64)
    yield "propagate", (links, ptr, holders, targets, np.array([0.0, 1.0, 1.0, 0.0]), 0.5, False)


def _agree(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=1e-9, atol=1e-9, equal_nan=True)


def _best(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", choices=("small", "medium"), default="small")
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy column is meaningful")
    print(f"{'kernel':<20} {'numba [ms]':>12} {'numpy [ms]':>12} {'speedup':>9}  agree")
    for name, inputs in cases(args.scale):
        jit_fn = getattr(kernels, f"{name}_loops")
        np_fn = getattr(kernels, f"{name}_numpy")
        ref = np_fn(*inputs)
        out = jit_fn(*inputs)  # compiles on first call
        ok = _agree(out, ref)
        t_jit = _best(jit_fn, inputs, args.repeat)
        t_np = _best(np_fn, inputs, args.repeat)
        print(f"{name:<20} {t_jit * 1e3:12.3f} {t_np * 1e3:12.3f} {t_np / t_jit:9.1f}x  {'yes' if ok else 'NO'}")


if __name__ == "__main__":
    main()
