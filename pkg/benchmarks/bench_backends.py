"""Time each kernel on the compiled and the pure-Python backend.

    python3 benchmarks/bench_backends.py [--quick]

Inputs are small enough for the Python backend to finish in about a minute;
outputs are checked for equality so the timing compares identical work.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from comfortgraph import _backend
from comfortgraph.embedding.skipgram import NEGATIVE_TABLE_SIZE


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases(rng: np.random.Generator, scale: float):
    n_pts = int(2000 * scale)
    pts = rng.random((n_pts, 2))
    levels = np.floor(-np.log(1 - rng.random(n_pts)) / np.log(16)).astype(np.int32)
    queries = rng.random((100, 2))

    n_nodes = int(500 * scale)
    nbrs = [sorted({(i + 1) % n_nodes, (i - 1) % n_nodes, int(rng.integers(0, n_nodes))} - {i})
            for i in range(n_nodes)]
    indptr = np.concatenate([[0], np.cumsum([len(x) for x in nbrs])]).astype(np.int64)
    indices = np.concatenate(nbrs).astype(np.int64)
    starts = np.tile(np.arange(n_nodes, dtype=np.int64), 4)
    seeds = np.arange(len(starts), dtype=np.uint64) * np.uint64(2654435761)
    table = rng.integers(0, n_nodes, NEGATIVE_TABLE_SIZE).astype(np.int32)

    n_rows = int(600 * scale)
    X = rng.normal(size=(n_rows, 22))
    y = (X[:, 0] + 0.5 * rng.normal(size=n_rows) > 0).astype(np.int32) + (X[:, 1] > 1).astype(np.int32)
    rows = rng.integers(0, n_rows, n_rows).astype(np.int64)

    def hnsw(k):
        links, counts, entry, top = k.hnsw_build(pts, levels, 16, 100)
        return k.hnsw_search(pts, links, counts, entry, top, queries, 10, 64)

    def walks(k):
        return k.random_walks(indptr, indices, starts, seeds, 20)

    def sgns(k):
        w = k.random_walks(indptr, indices, starts[:n_nodes], seeds[:n_nodes], 20)
        s0 = np.random.default_rng(1).uniform(-0.025, 0.025, (n_nodes, 20))
        s1 = np.zeros_like(s0)
        loss = k.sgns_train(w, s0, s1, table, 5, 5, 1, 0.025, 1e-4, 3)
        return s0, loss

    def tree(k):
        return k.grow_tree(X, y, rows, 3, 4, 220, 2, 11)

    return {"hnsw build+search": hnsw, "random walks": walks, "skip-gram epoch": sgns, "grow tree": tree}


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, z) for x, z in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="quarter-size inputs")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    compiled, python = _backend.load("compiled"), _backend.load("python")
    scale = 0.25 if args.quick else 1.0
    print(f"{'kernel':<20}{'compiled s':>12}{'python s':>12}{'speed-up':>10}  identical")
    for name, fn in cases(np.random.default_rng(0), scale).items():
        tc = _time(lambda: fn(compiled), args.repeat)
        tp = _time(lambda: fn(python), 1)
        same = _same(fn(compiled), fn(python))
        print(f"{name:<20}{tc:>12.4f}{tp:>12.3f}{tp / tc:>9.0f}x  {same}")


if __name__ == "__main__":
    main()
