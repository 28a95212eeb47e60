"""HNSW approximate nearest-neighbour index over planar points."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .._backend import kernels
from ..errors import EmptyIndex, ValidationError

DEFAULT_M = 16
DEFAULT_EF_CONSTRUCTION = 200
DEFAULT_EF_SEARCH = 64


@dataclass
class KnnIndex:
    points: np.ndarray
    ids: list[str]
    m: int = DEFAULT_M
    ef_construction: int = DEFAULT_EF_CONSTRUCTION
    ef_search: int = DEFAULT_EF_SEARCH
    links: np.ndarray = field(default=None, repr=False)
    counts: np.ndarray = field(default=None, repr=False)
    levels: np.ndarray = field(default=None, repr=False)
    entry: int = -1
    max_level: int = -1

    def __len__(self) -> int:
        return len(self.ids)

    def query(self, q: Sequence[float], k: int = 1, ef: int | None = None) -> list[tuple[str, float]]:
        return knn_query(self, q, k, ef)


def knn_build(points, ids: Sequence[str] | None = None, m: int = DEFAULT_M,
              ef_construction: int = DEFAULT_EF_CONSTRUCTION, ef_search: int = DEFAULT_EF_SEARCH,
              seed: int = 0, backend=None) -> KnnIndex:
    """Build an HNSW index; layer assignment is drawn from ``seed``."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValidationError("points must be an (n, d) array")
    ids = [str(i) for i in range(len(pts))] if ids is None else list(ids)
    if len(ids) != len(pts):
        raise ValidationError("ids and points differ in length")
    if m < 2:
        raise ValidationError("m must be at least 2")
    rng = np.random.default_rng(seed)
    levels = np.floor(-np.log(1.0 - rng.random(len(pts))) / math.log(m)).astype(np.int32)
    index = KnnIndex(pts, ids, m, ef_construction, ef_search, levels=levels)
    if len(pts):
        k = backend or kernels
        index.links, index.counts, index.entry, index.max_level = k.hnsw_build(pts, levels, m, ef_construction)
    return index


def knn_query_many(index: KnnIndex, queries, k: int, ef: int | None = None, backend=None):
    """Batch query; returns (positions int64[q, k], distances float64[q, k])."""
    if len(index) == 0:
        raise EmptyIndex("index holds no points")
    if k < 1:
        raise ValidationError("k must be >= 1")
    q = np.ascontiguousarray(np.atleast_2d(queries), dtype=np.float64)
    if q.shape[1] != index.points.shape[1]:
        raise ValidationError(f"query dimension {q.shape[1]} != index dimension {index.points.shape[1]}")
    kk = min(k, len(index))
    impl = backend or kernels
    pos, d2 = impl.hnsw_search(index.points, index.links, index.counts, index.entry, index.max_level, q, kk,
                               ef or index.ef_search)
    return pos, np.sqrt(d2)


def knn_query(index: KnnIndex, q: Sequence[float], k: int = 1, ef: int | None = None) -> list[tuple[str, float]]:
    """Up to ``k`` (id, Euclidean distance) pairs, nearest first."""
    pos, dist = knn_query_many(index, [q], k, ef)
    return [(index.ids[p], float(d)) for p, d in zip(pos[0], dist[0]) if p >= 0]


def exact_knn(points, q, k: int) -> list[tuple[int, float]]:
    """Linear-scan reference: (position, distance) of the k nearest points."""
    pts = np.asarray(points, dtype=float)
    d = np.sqrt(((pts - np.asarray(q, dtype=float)) ** 2).sum(axis=1))
    order = np.lexsort((np.arange(len(pts)), d))[:k]
    return [(int(i), float(d[i])) for i in order]
